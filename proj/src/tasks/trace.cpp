#include "pfoe/tasks/trace.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pfoe::tasks {

namespace {

constexpr std::string_view kHeader = "pfoe-trace v1 dt=";
constexpr std::string_view kColumns =
    "# step trial x y theta v_linear v_angular z_lf z_ls z_rs z_rf mode_t mode_mass cmd_linear "
    "cmd_angular";

void put(std::ostream& out, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("cannot format trace value");
  out.write(buf, end - buf);
}

template <class T>
T take(std::istringstream& is, std::size_t line_no) {
  std::string tok;
  if (!(is >> tok)) throw ParseError(line_no, "truncated trace line");
  T v{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw ParseError(line_no, "bad trace value '" + tok + "'");
  }
  return v;
}

}  // namespace

Trace Trace::slice(std::size_t begin, std::size_t end) const {
  Trace t;
  t.dt = dt;
  end = std::min(end, steps.size());
  if (begin < end) {
    t.steps.assign(steps.begin() + static_cast<std::ptrdiff_t>(begin),
                   steps.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return t;
}

void write_trace(const Trace& trace, std::ostream& out) {
  out << kHeader;
  put(out, trace.dt);
  out << '\n' << kColumns << '\n';
  for (const auto& s : trace.steps) {
    out << s.step << ' ' << s.trial << ' ';
    put(out, s.pose.x);
    out << ' ';
    put(out, s.pose.y);
    out << ' ';
    put(out, s.pose.theta);
    out << ' ';
    put(out, s.action.v_linear);
    out << ' ';
    put(out, s.action.v_angular);
    for (auto v : s.z.z) out << ' ' << v;
    out << ' ' << s.mode_t << ' ';
    put(out, s.mode_mass);
    out << ' ';
    put(out, s.command.v_linear);
    out << ' ';
    put(out, s.command.v_angular);
    out << '\n';
  }
}

std::string format_trace(const Trace& trace) {
  std::ostringstream os;
  write_trace(trace, os);
  return os.str();
}

Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line.rfind(kHeader, 0) != 0) {
    throw ParseError(1, "expected 'pfoe-trace v1 dt=<seconds>' header");
  }
  {
    const std::string dt = line.substr(kHeader.size());
    auto [ptr, ec] = std::from_chars(dt.data(), dt.data() + dt.size(), trace.dt);
    if (ec != std::errc{} || ptr != dt.data() + dt.size() || !(trace.dt > 0.0)) {
      throw ParseError(1, "bad dt in trace header");
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    TraceStep s;
    s.step = take<std::size_t>(is, line_no);
    s.trial = take<int>(is, line_no);
    s.pose.x = take<double>(is, line_no);
    s.pose.y = take<double>(is, line_no);
    s.pose.theta = take<double>(is, line_no);
    s.action.v_linear = take<double>(is, line_no);
    s.action.v_angular = take<double>(is, line_no);
    for (auto& v : s.z.z) v = take<std::int32_t>(is, line_no);
    s.mode_t = take<std::size_t>(is, line_no);
    s.mode_mass = take<double>(is, line_no);
    s.command.v_linear = take<double>(is, line_no);
    s.command.v_angular = take<double>(is, line_no);
    trace.steps.push_back(s);
  }
  return trace;
}

void save_trace(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file '" + path + "'");
  write_trace(trace, out);
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file '" + path + "'");
  return read_trace(in);
}

}  // namespace pfoe::tasks
