#pragma once

#include <string>

#include "json.hpp"

#include "bsphere/cvs.hpp"
#include "bsphere/mating.hpp"
#include "bsphere/snake.hpp"

namespace bsphere::io {

// Snake JSON: {"n", "seed", "f", "g"}.
nlohmann::json snake_to_json(const ContourPair& h);
ContourPair snake_from_json(const nlohmann::json& j);
void write_snake(const std::string& path, const ContourPair& h);
ContourPair read_snake(const std::string& path);

// Binary matrix: u32 m, m x u32 points, then the strict upper triangle
// row by row as little-endian f64.
void write_matrix(const std::string& path, const DistanceMatrix& d);
DistanceMatrix read_matrix(const std::string& path);
// CSV: header "point,<points...>", then one row per point.
void write_matrix_csv(const std::string& path, const DistanceMatrix& d);

// Marks sidecar of a matrix file: {"i0", "i1", "mass", "epsilon"?}.
nlohmann::json marks_to_json(const MarkedSphereSample& s);
MarkedSphereSample marked_from(DistanceMatrix d, const nlohmann::json& marks);

// Map JSON: {"half_edges": [{"opp", "next"}...], "root", "pointed"}.
nlohmann::json map_to_json(const cvs::Quadrangulation& q);
cvs::Quadrangulation map_from_json(const nlohmann::json& j);

// Tree JSON: a vertex is [label, child, child, ...] with children nested
// the same way, left to right.
nlohmann::json tree_to_json(const cvs::LabeledPlaneTree& t);
cvs::LabeledPlaneTree tree_from_json(const nlohmann::json& j);

nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace bsphere::io
