#pragma once

#include <iosfwd>
#include <string>

#include "gndirac/functionals.hpp"
#include "gndirac/model.hpp"

namespace gndirac {

/// Slice CSV: header "x,re_u,im_u,re_v,im_v", one row per node, %.17g.
/// A leading "# t=<t> boundary=<0|1> grid_first=<j>" comment carries the metadata.
void write_slice_csv(std::ostream& os, const SpinorField& s);
void write_slice_csv(const std::string& path, const SpinorField& s);
SpinorField read_slice_csv(std::istream& is);
SpinorField read_slice_csv(const std::string& path);

/// Report CSV: t,L_u,L_v,L0,D0,Q0,F0 (+ L1,D1,Q1,F1 for difference reports).
void write_report_csv(std::ostream& os, const FunctionalReport& r);
void write_report_csv(const std::string& path, const FunctionalReport& r);
FunctionalReport read_report_csv(std::istream& is);

/// Tabulated initial data; same columns as a slice, comment lines allowed.
TabulatedData read_tabulated_csv(const std::string& path);

}  // namespace gndirac
