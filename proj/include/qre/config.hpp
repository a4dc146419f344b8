#pragma once

#include <map>
#include <string>

#include "qre/estimator.hpp"

// Toolchain run configuration: a flat `key = value` text file plus
// command-line overrides.
namespace qre::config {

struct RunConfig {
    std::string input_path;
    std::string output_dir = ".";
    std::string adjacency_path;  // edge-list file for arbitrary devices
    est::EstimateConfig estimate;
    est::SweepSpec sweep;
    bool has_sweep = false;

    void check() const;  // throws std::invalid_argument on inconsistency
};

// Parses `key = value` lines; '#' starts a comment. Unknown keys throw.
RunConfig parse_config(const std::string& text);

// Applies one `key=value` override on top of a parsed config.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace qre::config
