#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "eulerlab/diagnostics.hpp"
#include "eulerlab/fields.hpp"
#include "eulerlab/profiles.hpp"
#include "eulerlab/solver.hpp"

namespace eulerlab::io {

// Snapshot container: a one-line JSON header (schema version 1) followed by
// row-major little-endian float64 payload, 8 * nr * nz bytes per named field
// in header order. Write/read round trips are bitwise lossless.
void write_state(const std::filesystem::path& path, const State& s);
State read_state(const std::filesystem::path& path);

// Profile files reuse the same container. Analytic families serialize as
// header tags carrying their parameters with no payload; grid-backed sets
// store their lattice in the header and the three profile arrays as payload.
void write_profiles(const std::filesystem::path& path, const ProfileSet& ps);
std::unique_ptr<ProfileSet> read_profiles(const std::filesystem::path& path);

void write_diagnostics_csv(const std::filesystem::path& path,
                           const std::vector<StepRecord>& rows);

// (t, sup) series; also accepts a simulate diagnostics CSV, taking
// max_abs_omega1 as the sup column.
BkmSeries read_bkm_csv(const std::filesystem::path& path, double horizon);
void write_bkm_csv(const std::filesystem::path& path, const BkmSeries& series);

// Shell-style wildcard expansion (*, ?) on the final path component;
// results sorted lexicographically. A pattern with no wildcard names a
// single file.
std::vector<std::filesystem::path> expand_glob(const std::string& pattern);

}  // namespace eulerlab::io
