#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hedgedim {

// Axis-aligned square. Coordinates are doubles; with dyadic coordinates every
// area and intersection below is computed without rounding.
struct Box {
  double x = 0, y = 0, side = 1;
  bool half_open = true;

  double area() const { return side * side; }
  double diameter() const;
  bool contains(const Box& b) const;
  bool contains_point(double px, double py) const;
  bool meets_disk(double cx, double cy, double r) const;
  bool inside_disk(double cx, double cy, double r) const;
};

double intersection_area(const Box& a, const Box& b);

struct Generation {
  int index = 0;
  std::vector<Box> boxes;
  std::vector<int> parent;  // index into the previous generation, or empty when unknown

  size_t count() const { return boxes.size(); }
};

// delta[k] and dia[n] may run past the materialized generations; the
// bound only needs the declared sequences.
struct NestedFamily {
  std::vector<Generation> generations;
  std::vector<double> delta;  // delta[0] is unused (1)
  std::vector<double> dia;

  int declared_depth() const { return static_cast<int>(dia.size()); }
};

double density(const std::vector<Box>& K, const Box& omega);

struct NestingReport {
  bool ok = true;
  int condition = 0;  // 1..4 nesting conditions, 5 declared delta, 6 declared diameters
  int generation = -1;
  int box = -1;
  std::string message;
};
NestingReport validate_nesting(const NestedFamily& family);

struct DimensionBound {
  double value = 2;
  double raw = 2;  // 2 - surrogate before clamping
  std::vector<double> quotient_tail;  // c_n for n = first_n, first_n + 1, ...
  int first_n = 0;
  int window = 5;
  bool mcmullen_indexing = false;
};
// Default indexing sums |log delta_k| for k = 1..n+1; mcmullen_indexing stops at k = n.
DimensionBound mcmullen_bound(const NestedFamily& family, int window, bool mcmullen_indexing = false);

struct MartingaleMeasure {
  std::vector<std::vector<double>> mass;
  double max_conservation_error = 0;  // over all parents, |sum of child masses - parent mass|
};
MartingaleMeasure martingale_measure(const NestedFamily& family);

struct FrostmanReport {
  double s = 0;
  int samples = 0;
  double max_ratio = 0;
  double at_x = 0, at_y = 0, at_r = 0;
  double r_min = 0, r_max = 0;
};
FrostmanReport frostman_check(const MartingaleMeasure& measure, const NestedFamily& family, double s, int samples,
                              std::uint64_t seed);

using Point = std::pair<double, double>;

NestedFamily extract_nest(const std::vector<Point>& points, const std::vector<double>& scales, const Box& root);

struct BoxCountEstimate {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  std::vector<double> scales;
  std::vector<std::size_t> counts;
};
BoxCountEstimate box_count_dimension(const std::vector<Point>& points, const std::vector<double>& scales,
                                     const Box& root);

// Four corner squares of side 1/4 at every step; generations past
// `materialize` are declared through delta and dia only.
NestedFamily corner_family(int generations, int materialize, double side = 1.0);
NestedFamily rescale(const NestedFamily& family, double lambda);
// Leaf centers of the corner construction on the unit square.
std::vector<Point> corner_points(int depth);

// Smallest power-of-two square, cornered on a grid of side/8, holding every
// point; its power-of-two subdivisions have exactly representable corners.
Box dyadic_bounding_square(const std::vector<Point>& points);

nlohmann::json family_to_json(const NestedFamily& family);
std::string family_to_csv(const NestedFamily& family);
nlohmann::json to_json(const DimensionBound& b);
nlohmann::json to_json(const BoxCountEstimate& e);

std::vector<Point> read_points_csv(const std::string& path);

}  // namespace hedgedim
