#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "fhnpulse/descent.hpp"
#include "fhnpulse/model.hpp"
#include "fhnpulse/parabolic.hpp"
#include "fhnpulse/speed_finder.hpp"

namespace fhn {

struct StabilityConfig {
  double threshold = 0.05;  // 0.10 is the default for strips
  double lengths = 1.0;     // domain lengths to propagate
};

struct PathsConfig {
  std::string output_dir = ".";
  std::string checkpoint_dir;  // empty: no checkpoints
};

// Sections: [model] [grid] [descent] [scan] [stability] [paths].
// model.d, model.gamma and model.beta are required; everything else has a default.
// Numbers may be written as fractions ("1/16").
struct RunConfig {
  ModelParams model;
  GridSpec grid;
  DescentConfig descent;
  ScanConfig scan;
  StabilityConfig stability;
  PathsConfig paths;

  // Everything the downstream modules would reject, checked up front.
  void validate() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string format_config(const RunConfig& cfg);

// --- checkpoints ---------------------------------------------------------------

inline constexpr int kCheckpointVersion = 1;

struct CheckpointMeta {
  double c = 0.0;
  double d = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  double J = 0.0;
};

struct Checkpoint {
  Profile profile;
  CheckpointMeta meta;
};

// Plain-text header followed by the raw little-endian samples and a checksum.
void save_checkpoint(const std::string& path, const Profile& p, const CheckpointMeta& meta);
Checkpoint load_checkpoint(const std::string& path);

// The value of d to compute with: the command-line value when given (with a
// warning on `warn` if it disagrees with the header), the header value otherwise.
double reconcile_d(const CheckpointMeta& meta, std::optional<double> cli_d, std::ostream* warn);

// --- export ------------------------------------------------------------------------

// Columns: c, J, converged, checkpoint_path. 17 significant digits.
void write_scan_csv(std::ostream& os, const SpeedScan& scan);
// Columns: x, w (lines) or x, y, w (strips).
void write_profile_csv(std::ostream& os, const Profile& p);
Profile read_profile_csv(std::istream& is);

std::string to_json(const SpeedScan& scan);
std::string to_json(const RootResult& root, const ModelParams& params);
std::string to_json(const StabilityReport& report);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace fhn
