// Copyright 2026 The cmrf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CMRF_IO_HPP
#define CMRF_IO_HPP

// Plain-text persistence. Reals are written with 17 significant digits, so a
// write/read round trip is exact.
//
//   model n=<n>               samples m=<m> count=<c> seed=<s>     table m=<m>
//   bias <i> <theta_i>        <one row of +-1 per sample>          <2^m probabilities,
//   edge <i> <j> <M_ij>                                             in index order>
//   visible <v> <v> ...       (optional; default all vertices)
//
// Blank lines and text after '#' are ignored. Malformed input throws
// ParseError carrying the line and column.

#include <iosfwd>
#include <string>

#include "cmrf/exact.hpp"
#include "cmrf/ising.hpp"
#include "cmrf/spin.hpp"

namespace cmrf {

std::string format_real(double x);

void write_model(std::ostream& out, const IsingModel& model);
void write_cmrf(std::ostream& out, const Cmrf& cmrf);
Cmrf read_cmrf(std::istream& in, const std::string& source = "<model>");
IsingModel read_model(std::istream& in, const std::string& source = "<model>");

void write_samples(std::ostream& out, const SampleSet& samples);
SampleSet read_samples(std::istream& in, const std::string& source = "<samples>");

void write_table(std::ostream& out, const DistributionTable& table);
DistributionTable read_table(std::istream& in, const std::string& source = "<table>");

// File wrappers; open failures throw InvalidArgument.
Cmrf read_cmrf_file(const std::string& path);
SampleSet read_samples_file(const std::string& path);
DistributionTable read_table_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace cmrf

#endif  // CMRF_IO_HPP
