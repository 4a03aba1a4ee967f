#include "nsode/csv.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>

#include "nsode/errors.hpp"

namespace nsode::csv {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view field) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw InvalidArgument("csv: cannot parse '" + std::string(field) + "' as a number");
  }
  return v;
}

std::vector<std::string> split_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? line.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

namespace {

std::vector<std::vector<std::string>> read_records(std::istream& is, std::vector<std::string>& header) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("csv: missing header");
  header = split_line(line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != header.size()) {
      throw InvalidArgument("csv: row has " + std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(header.size()));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

void expect_header(const std::vector<std::string>& got, const std::vector<std::string>& want) {
  if (got.size() < want.size()) throw InvalidArgument("csv: header too short");
  for (std::size_t i = 0; i < want.size(); ++i) {
    if (got[i] != want[i]) {
      throw InvalidArgument("csv: expected column '" + want[i] + "', found '" + got[i] + "'");
    }
  }
}

std::size_t parse_index(const std::string& s) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidArgument("csv: bad index '" + s + "'");
  }
  return v;
}

void write_state_header(std::ostream& os, std::size_t dim) {
  for (std::size_t i = 0; i < dim; ++i) os << ",x" << i;
}

}  // namespace

void write_order_study(std::ostream& os, const std::vector<OrderStudyRow>& rows) {
  os << "tau,epsilon,global_error,reduction_factor\n";
  for (const auto& r : rows) {
    os << format_double(r.tau) << ',' << format_double(r.eps) << ',' << format_double(r.global_error)
       << ',';
    if (r.reduction_factor) os << format_double(*r.reduction_factor);
    os << '\n';
  }
}

std::vector<OrderStudyRow> read_order_study(std::istream& is) {
  std::vector<std::string> header;
  const auto records = read_records(is, header);
  expect_header(header, {"tau", "epsilon", "global_error", "reduction_factor"});
  std::vector<OrderStudyRow> out;
  for (const auto& f : records) {
    OrderStudyRow r{parse_double(f[0]), parse_double(f[1]), parse_double(f[2]), std::nullopt};
    if (!f[3].empty()) r.reduction_factor = parse_double(f[3]);
    out.push_back(r);
  }
  return out;
}

void write_trajectory(std::ostream& os, const std::vector<MeshPoint>& mesh) {
  os << 't';
  write_state_header(os, mesh.empty() ? 0 : mesh.front().x.size());
  os << '\n';
  for (const auto& pt : mesh) {
    os << format_double(pt.t);
    for (double v : pt.x) os << ',' << format_double(v);
    os << '\n';
  }
}

std::vector<MeshPoint> read_trajectory(std::istream& is) {
  std::vector<std::string> header;
  const auto records = read_records(is, header);
  expect_header(header, {"t"});
  std::vector<MeshPoint> out;
  for (const auto& f : records) {
    std::vector<double> x;
    for (std::size_t i = 1; i < f.size(); ++i) x.push_back(parse_double(f[i]));
    out.push_back({parse_double(f[0]), Vector(std::move(x))});
  }
  return out;
}

std::vector<EventRow> event_rows(const std::vector<EventRecord>& events) {
  std::vector<EventRow> out;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const EventRecord& e = events[i];
    EventRow r;
    r.index = i;
    r.t = e.t_star;
    r.theta = e.theta_star;
    r.direction = e.direction;
    r.residual = e.residual;
    r.x.assign(e.x_star.begin(), e.x_star.end());
    if (e.guard) {
      r.guard_mode = to_string(e.guard->mode);
      r.guard_passed = e.guard->passed;
      r.guard_certified_sigma = e.guard->certified_sigma;
      for (const auto& [name, value] : e.guard->coefficients) r.guard_coefficients.push_back(value);
    }
    out.push_back(std::move(r));
  }
  return out;
}

constexpr std::size_t kGuardCoefficientColumns = 3;

void write_events(std::ostream& os, const std::vector<EventRow>& rows, std::size_t dim) {
  bool any_guard = false;
  for (const auto& r : rows) any_guard = any_guard || r.guard_mode.has_value();

  os << "index,t,theta,direction,residual";
  write_state_header(os, dim);
  if (any_guard) os << ",guard_mode,guard_passed,certified_sigma,g0,g1,g2";
  os << '\n';
  for (const auto& r : rows) {
    if (r.x.size() != dim) throw DimensionMismatch("write_events: state size differs from dim");
    os << r.index << ',' << format_double(r.t) << ',' << format_double(r.theta) << ','
       << to_string(r.direction) << ',' << format_double(r.residual);
    for (double v : r.x) os << ',' << format_double(v);
    if (any_guard) {
      os << ',' << r.guard_mode.value_or("") << ',';
      if (r.guard_passed) os << (*r.guard_passed ? "true" : "false");
      os << ',';
      if (r.guard_certified_sigma) os << format_double(*r.guard_certified_sigma);
      for (std::size_t k = 0; k < kGuardCoefficientColumns; ++k) {
        os << ',';
        if (k < r.guard_coefficients.size()) os << format_double(r.guard_coefficients[k]);
      }
    }
    os << '\n';
  }
}

void write_events(std::ostream& os, const std::vector<EventRecord>& events, std::size_t dim) {
  write_events(os, event_rows(events), dim);
}

std::vector<EventRow> read_events(std::istream& is) {
  std::vector<std::string> header;
  const auto records = read_records(is, header);
  expect_header(header, {"index", "t", "theta", "direction", "residual"});
  std::size_t dim = 0;
  while (5 + dim < header.size() && header[5 + dim] == "x" + std::to_string(dim)) ++dim;
  const bool has_guard = header.size() > 5 + dim;
  if (has_guard) {
    std::vector<std::string> want(header.begin(), header.begin() + 5 + dim);
    for (const char* name : {"guard_mode", "guard_passed", "certified_sigma", "g0", "g1", "g2"}) {
      want.emplace_back(name);
    }
    expect_header(header, want);
    if (header.size() != want.size()) throw InvalidArgument("csv: unexpected trailing columns");
  }

  std::vector<EventRow> out;
  for (const auto& f : records) {
    EventRow r;
    r.index = parse_index(f[0]);
    r.t = parse_double(f[1]);
    r.theta = parse_double(f[2]);
    if (f[3] == "R1toR2") {
      r.direction = Direction::R1toR2;
    } else if (f[3] == "R2toR1") {
      r.direction = Direction::R2toR1;
    } else {
      throw InvalidArgument("csv: bad direction '" + f[3] + "'");
    }
    r.residual = parse_double(f[4]);
    for (std::size_t i = 0; i < dim; ++i) r.x.push_back(parse_double(f[5 + i]));
    if (has_guard) {
      const std::size_t g = 5 + dim;
      if (!f[g].empty()) r.guard_mode = f[g];
      if (f[g + 1] == "true") r.guard_passed = true;
      if (f[g + 1] == "false") r.guard_passed = false;
      if (!f[g + 2].empty()) r.guard_certified_sigma = parse_double(f[g + 2]);
      for (std::size_t k = 0; k < kGuardCoefficientColumns; ++k) {
        if (!f[g + 3 + k].empty()) r.guard_coefficients.push_back(parse_double(f[g + 3 + k]));
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace nsode::csv
