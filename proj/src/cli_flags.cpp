// SPDX-License-Identifier: Apache-2.0
#include "agentic/eval/cli_flags.hpp"

#include <algorithm>

#include <CLI11.hpp>

#include "agentic/errors.hpp"

namespace agentic::eval {

void add_ablation_flags(CLI::App& app, AblationFlags& flags) {
    app.add_flag("--no-search", flags.no_search, "Disable the web-search tool");
    app.add_flag("--no-code", flags.no_code, "Disable the coding tool");
    app.add_flag("--no-mindmap", flags.no_mindmap, "Disable the Mind-Map tool and mind-map memory");
    app.add_option("--memory", flags.memory, "Memory mode for agent context")
        ->check(CLI::IsMember({"none", "raw", "mindmap"}));
    app.add_flag("--no-breakdown", flags.no_breakdown, "Web search: skip query breakdown");
    app.add_flag("--no-rerank", flags.no_rerank, "Web search: skip reranking and the relevance gate");
    app.add_flag("--no-mindmap-context", flags.no_mindmap_context, "Web search: no Mind-Map reasoning context");
    app.add_flag("--knowledge-refinement", flags.knowledge_refinement, "Web search: summarize pages before RAG");
}

void apply_ablation_flags(SessionConfig& config, const AblationFlags& flags) {
    if (flags.no_search) config.tools.web_search = false;
    if (flags.no_code) config.tools.code = false;
    if (flags.no_mindmap) {
        config.tools.mind_map = false;
        if (!flags.memory && config.memory == MemoryMode::MindMap) config.memory = MemoryMode::None;
    }
    if (flags.memory) {
        auto mode = memory_mode_from_string(*flags.memory);
        if (!mode) throw ConfigError("unknown memory mode: " + *flags.memory);
        config.memory = *mode;
    }
    if (flags.no_breakdown) config.websearch.query_breakdown = false;
    if (flags.no_rerank) config.websearch.rerank = false;
    if (flags.no_mindmap_context) config.websearch.mindmap_context = false;
    if (flags.knowledge_refinement) config.websearch.knowledge_refinement = true;
}

AblationFlags parse_ablation_flags(const std::vector<std::string>& args) {
    CLI::App app{"ablation flags"};
    AblationFlags flags;
    add_ablation_flags(app, flags);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw ConfigError(std::string("bad flags: ") + e.what());
    }
    return flags;
}

}  // namespace agentic::eval
