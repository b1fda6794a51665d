#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "survmap/errors.hpp"
#include "survmap/format.hpp"
#include "survmap/trace.hpp"

namespace survmap {
namespace {

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::string where(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

}  // namespace

BinaryTrace read_trace(std::istream& in, std::optional<Seconds> cycle_period) {
  std::vector<BinaryTrace::Bit> bits;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = strip_cr(raw);
    if (!line.empty() && line.front() == '#') continue;
    if (line == "0" || line == "1") {
      bits.push_back(static_cast<BinaryTrace::Bit>(line.front() - '0'));
      continue;
    }
    throw InvalidInput(where(line_no) + "expected a single 0 or 1, got '" + std::string(line) + "'");
  }
  if (in.bad()) throw IoError("read error while loading trace");
  if (bits.empty()) throw InvalidInput("trace file contains no cycles");
  return BinaryTrace(std::move(bits), cycle_period);
}

BinaryTrace read_trace_file(const std::filesystem::path& path, std::optional<Seconds> cycle_period) {
  auto in = open_input(path);
  return read_trace(in, cycle_period);
}

void write_trace(std::ostream& out, const BinaryTrace& trace) {
  std::string buffer;
  buffer.reserve(2 * trace.size());
  for (const auto bit : trace.bits()) {
    buffer.push_back(static_cast<char>('0' + bit));
    buffer.push_back('\n');
  }
  out << buffer;
}

void write_trace_file(const std::filesystem::path& path, const BinaryTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_trace(out, trace);
  if (!out.flush()) throw IoError("write error on " + path.string());
}

std::vector<PacketLogRecord> read_packet_log(std::istream& in) {
  std::string raw;
  if (!std::getline(in, raw) || strip_cr(raw) != "seq,delay_us") {
    throw InvalidInput("packet log must start with the header 'seq,delay_us'");
  }
  std::vector<PacketLogRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = strip_cr(raw);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      throw InvalidInput(where(line_no) + "expected two comma-separated fields");
    }
    const auto seq_text = line.substr(0, comma);
    const auto delay_text = line.substr(comma + 1);

    PacketLogRecord record;
    const auto seq_end = seq_text.data() + seq_text.size();
    const auto [seq_ptr, seq_ec] = std::from_chars(seq_text.data(), seq_end, record.seq);
    if (seq_ec != std::errc{} || seq_ptr != seq_end || seq_text.empty()) {
      throw InvalidInput(where(line_no) + "invalid sequence number '" + std::string(seq_text) + "'");
    }
    if (!delay_text.empty()) {
      double delay_us = 0.0;
      const auto delay_end = delay_text.data() + delay_text.size();
      const auto [delay_ptr, delay_ec] = std::from_chars(delay_text.data(), delay_end, delay_us);
      if (delay_ec != std::errc{} || delay_ptr != delay_end || !(delay_us >= 0.0)) {
        throw InvalidInput(where(line_no) + "invalid delay '" + std::string(delay_text) + "'");
      }
      record.delay = delay_us / 1e6;
    }
    records.push_back(record);
  }
  if (in.bad()) throw IoError("read error while loading packet log");
  return records;
}

std::vector<PacketLogRecord> read_packet_log_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_packet_log(in);
}

void write_cdf(std::ostream& out, std::span<const CdfPoint> cdf) {
  out << "downtime_ms,cdf\n";
  for (const auto& point : cdf) {
    out << format_number(point.downtime * 1e3) << ',' << format_number(point.cumulative_fraction) << '\n';
  }
}

}  // namespace survmap
