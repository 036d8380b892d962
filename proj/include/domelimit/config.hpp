#pragma once

#include <cstdint>
#include <string>

#include "domelimit/studies.hpp"

namespace dome {

enum class StudyKind { convergence, sweep, min_thickness };

const char* study_kind_name(StudyKind k);

struct StudyBlock {
  StudyKind kind = StudyKind::convergence;
  std::vector<std::array<int, 2>> meshes{{4, 8}, {8, 16}, {16, 32}, {32, 64}, {64, 128}};
  std::vector<int> n_alphas{2, 4, 8, 16, 32, 64};
  SweepVariable variable = SweepVariable::thickness_ratio;
  std::vector<double> values;  // sweep grid; min-thickness runs once per value
  std::vector<FrictionMode> friction_modes{FrictionMode::coulomb};
  std::array<double, 2> bracket{0.01, 0.2};
  double tolerance = 1e-4;

  bool operator==(const StudyBlock&) const = default;
};

struct OutputOptions {
  std::string directory = "out";
  bool vtk = true;
  bool cracks = true;
  bool program = false;
  double amplitude = 0.1;
  int jobs = 1;

  bool operator==(const OutputOptions&) const = default;
};

struct RunConfig {
  StudySpec spec;
  bool has_study = false;
  StudyBlock study;
  OutputOptions output;

  bool operator==(const RunConfig&) const = default;

  // Throws ConfigError.
  void validate() const;
};

// Keys not listed in the defaults are rejected; missing keys take defaults.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Single-line JSON with sorted keys and round-trip precision.
std::string dump_config(const RunConfig& cfg);

// FNV-1a of the canonical dump, output block excluded.
std::uint64_t settings_hash(const RunConfig& cfg);
std::string settings_hash_hex(const RunConfig& cfg);

}  // namespace dome
