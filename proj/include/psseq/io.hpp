#ifndef PSSEQ_IO_HPP
#define PSSEQ_IO_HPP

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <psseq/continued_fraction.hpp>
#include <psseq/linear_eq.hpp>

namespace psseq {

// "k,a_k,p_k,q_k".
void write_cf_csv(std::ostream &os, const ContinuedFraction &cf);
// "x,y,z".
void write_xyz_csv(std::ostream &os, const std::vector<XYZTriple> &triples);

// Static SVG histogram of values in [0, 1) with `bins` equal bins; the
// dashed line marks the uniform density.
void write_histogram_svg(std::ostream &os, std::span<const double> values, int bins, const std::string &title);

// Writes `content` to path, replacing any existing file.
void write_file(const std::string &path, const std::string &content);

} // namespace psseq

#endif
