#pragma once

// CSV emission and parsing for order studies, trajectories and event lists.
// Numbers use the shortest representation that reads back to the same double,
// independent of the locale; lines end with '\n'.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nsode/events.hpp"
#include "nsode/study.hpp"

namespace nsode::csv {

std::string format_double(double v);
/// Throws InvalidArgument unless the whole field parses.
double parse_double(std::string_view field);

std::vector<std::string> split_line(std::string_view line);

/// tau,epsilon,global_error,reduction_factor
void write_order_study(std::ostream& os, const std::vector<OrderStudyRow>& rows);
std::vector<OrderStudyRow> read_order_study(std::istream& is);

/// t,x0..xN
void write_trajectory(std::ostream& os, const std::vector<MeshPoint>& mesh);
std::vector<MeshPoint> read_trajectory(std::istream& is);

struct EventRow {
  std::size_t index = 0;
  double t = 0.0;
  double theta = 0.0;
  Direction direction = Direction::R1toR2;
  double residual = 0.0;
  std::vector<double> x;
  std::optional<std::string> guard_mode;
  std::optional<bool> guard_passed;
  std::optional<double> guard_certified_sigma;
  /// Coefficients in report order (a0..a2, b0..b2 or min_derivative, m1, m2).
  std::vector<double> guard_coefficients;

  bool operator==(const EventRow&) const = default;
};

std::vector<EventRow> event_rows(const std::vector<EventRecord>& events);

/// index,t,theta,direction,residual,x0..xN, followed by
/// guard_mode,guard_passed,certified_sigma,g0,g1,g2 when any row has a guard.
void write_events(std::ostream& os, const std::vector<EventRow>& rows, std::size_t dim);
void write_events(std::ostream& os, const std::vector<EventRecord>& events, std::size_t dim);
std::vector<EventRow> read_events(std::istream& is);

}  // namespace nsode::csv
