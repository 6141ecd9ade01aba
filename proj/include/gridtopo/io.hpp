#pragma once

#include <string>

#include "gridtopo/lap.hpp"
#include "gridtopo/models.hpp"

namespace gridtopo {

// Shortest decimal text that round-trips the double exactly.
std::string fmt_full(double x);

// Grid case CSV with header from_bus,to_bus,g_line,b_tilde_line; lines
// beginning with '#' are comments, and '# buses: M' pins the bus count
// (otherwise the maximum index is used).
LineList read_case(const std::string& path);
void write_case(const std::string& path, const LineList& lines);

// Plain dense matrix CSV, one row per line.
Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& a);

// Measurement CSV with header n,bus,p,q,v_re,v_im,v_mag,theta; columns not
// used by the generating model stay empty. The model kind is inferred from
// the populated columns. The caller attaches a noise model afterwards, since
// the bus count is only known once the file is read.
MeasurementSet read_measurements(const std::string& path);
void write_measurements(const std::string& path, const MeasurementSet& meas);

}  // namespace gridtopo
