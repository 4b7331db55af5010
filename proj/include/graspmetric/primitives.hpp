#pragma once

#include "graspmetric/mesh.hpp"

// Closed, outward-wound reference solids.
namespace graspmetric::primitives {

// Axis-aligned box centered at the origin: 8 vertices, 12 faces.
TriangleMesh box(double size_x, double size_y, double size_z);
inline TriangleMesh unit_cube() { return box(1.0, 1.0, 1.0); }

// Subdivided icosahedron; `subdivisions` = 3 gives 642 vertices.
TriangleMesh icosphere(double radius, int subdivisions);

// Capped cylinder along z, centered at the origin.
TriangleMesh cylinder(double radius, double height, int segments);

// Union of the boxes [0,1]x[0,1]x[0,1] and [1,2]x[0,1]x[0,2], scaled.
TriangleMesh l_prism(double scale);

}  // namespace graspmetric::primitives
