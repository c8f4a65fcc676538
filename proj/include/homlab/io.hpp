#pragma once

// Text formats: point-cloud and report CSV with '#' metadata lines, and JSON
// renderings of norms, regions and chart reports. Output is byte-stable for
// identical inputs: fixed float formatting, no timestamps.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "homlab/measures.hpp"
#include "homlab/norms.hpp"
#include "homlab/rectify.hpp"
#include "homlab/regions.hpp"
#include "json.hpp"

namespace homlab {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

/// Metadata echoed into every artifact as '# key: value' lines.
struct RunHeader {
  std::string version;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string scale_window;  ///< empty when the command has no scales
  std::vector<std::pair<std::string, std::string>> extra;
};

std::string header_lines(const RunHeader& h);
nlohmann::ordered_json header_json(const RunHeader& h);

/// Column names x<w>_<i> for coordinate i of the weight-w layer.
std::vector<std::string> coordinate_names(const GroupSpec& g);

/// Cloud CSV: optional '#' lines, a header row, one row per point with the
/// coordinates followed by `weight`. An `# alpha: <v>` line carries alpha.
std::string write_cloud_csv(const PointCloud& cloud, const RunHeader* header = nullptr);
/// Throws MalformedSpec on bad rows. alpha comes from the file unless
/// `alpha` is nonnegative.
PointCloud read_cloud_csv(std::string_view text, const NormSpec& norm, double alpha = -1.0);

/// The '# key: value' lines of a CSV document.
std::map<std::string, std::string> read_csv_metadata(std::string_view text);

nlohmann::ordered_json to_json(const Point& p);
nlohmann::ordered_json to_json(const NormSpec& n);
nlohmann::ordered_json to_json(const Region& r);
nlohmann::ordered_json to_json(const ChartReport& r);

/// `chart_id,n_points,mass,lipschitz`
std::string chart_summary_csv(const PointCloud& cloud, const ChartReport& r, const RunHeader* header = nullptr);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace homlab
