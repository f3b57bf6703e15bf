#pragma once

#include <iosfwd>
#include <string>

#include "edgerecon/geometry.hpp"

namespace edgerecon {

// Mesh files: OBJ (v/f records, polygons fan-triangulated) and PLY (ascii or
// binary little-endian). Point clouds additionally accept XYZ text with three
// reals per line. The format is chosen from the file extension. Malformed
// input raises ParseError with the offending line; unreadable files IoError.

TriMesh load_mesh(const std::string& path);
void save_mesh(const TriMesh& mesh, const std::string& path);

PointCloud load_cloud(const std::string& path);
void save_cloud(const PointCloud& cloud, const std::string& path);

TriMesh read_obj(std::istream& is, const std::string& name = "<obj>");
void write_obj(std::ostream& os, const TriMesh& mesh);

TriMesh read_ply(std::istream& is, const std::string& name = "<ply>");
void write_ply(std::ostream& os, const TriMesh& mesh, bool binary = true);

PointCloud read_xyz(std::istream& is, const std::string& name = "<xyz>");
void write_xyz(std::ostream& os, const PointCloud& cloud);

}  // namespace edgerecon
