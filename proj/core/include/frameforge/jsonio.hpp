#pragma once

#include <string>
#include <vector>

#include "frameforge/apspace.hpp"
#include "frameforge/framebuilder.hpp"
#include "frameforge/localization.hpp"
#include "frameforge/trigpoly.hpp"

// Serialization of the library's objects. Everything numeric that is
// exact in memory stays exact on disk: rationals as "num/den", extended
// reals as "mantissa:exponent", integers as decimal strings. Doubles
// travel as JSON numbers with round-trip precision. Every JSON document
// records the mantissa precision it was written under.

namespace frameforge {

std::string read_file(const std::string& path);
// Writes through a sibling temp file and renames, so readers never see
// a torn file.
void atomic_write(const std::string& path, const std::string& content);

std::string trigpoly_to_json(const TrigPoly& f);
TrigPoly trigpoly_from_json(const std::string& text);

std::string certificate_to_json(const LocalizationCertificate& cert);

std::string scan_to_csv(const std::vector<ScanRow>& rows);

// Spectra live in two files: a JSON header at `path` and the samples as
// interleaved little-endian float64 re/im pairs at `path` + ".bin".
void write_spectrum(const std::string& path, const SampledSpectrum& u);
SampledSpectrum read_spectrum(const std::string& path);
std::string spectrum_to_csv(const SampledSpectrum& u);

// Plans keep their seed window in `path` + ".bin"; the stage chain is
// stored as parameters plus fitted coefficients, and loading replays
// the window products, the enumeration, and the functionals, which are
// all deterministic given those inputs.
void write_plan(const std::string& path, const FramePlan& plan);
FramePlan read_plan(const std::string& path);

std::string lambda_to_csv(const FramePlan& plan);
std::string expand_to_csv(const ExpandReport& rep);

}  // namespace frameforge
