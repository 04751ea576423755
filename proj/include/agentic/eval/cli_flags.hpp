// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agentic/session_config.hpp"

namespace CLI {
class App;
}

namespace agentic::eval {

/// Ablation switches shared by answer, research and eval.
struct AblationFlags {
    bool no_search = false;
    bool no_code = false;
    bool no_mindmap = false;
    std::optional<std::string> memory;
    bool no_breakdown = false;
    bool no_rerank = false;
    bool no_mindmap_context = false;
    bool knowledge_refinement = false;
};

void add_ablation_flags(CLI::App& app, AblationFlags& flags);

/// Flags override the config.  --no-mindmap disables the Mind-Map agent
/// entirely: the tool and, unless --memory is given, mind-map memory.
/// Throws ConfigError on an unknown --memory value.
void apply_ablation_flags(SessionConfig& config, const AblationFlags& flags);

/// Parses flags alone (no subcommand), for tests and scripted ablations.
AblationFlags parse_ablation_flags(const std::vector<std::string>& args);

}  // namespace agentic::eval
