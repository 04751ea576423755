// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <regex>
#include <string>

#include "agentic/backends/mock.hpp"

namespace agentic::support {

// Kinship fixture: maternal line Jason <- Helen <- Arthur <- Edmund and a
// paternal line Jason <- Tom <- George <- Henry.
inline const char* kKinshipRecords =
    "ENTITY\tJason\tthe person asked about\n"
    "ENTITY\tHelen\tJason's mother\n"
    "ENTITY\tArthur\tHelen's father\n"
    "ENTITY\tEdmund\tArthur's father\n"
    "ENTITY\tTom\tJason's father\n"
    "ENTITY\tGeorge\tTom's father\n"
    "ENTITY\tHenry\tGeorge's father\n"
    "REL\tHelen\tJason\tmother_of\n"
    "REL\tArthur\tHelen\tfather_of\n"
    "REL\tEdmund\tArthur\tfather_of\n"
    "REL\tTom\tJason\tfather_of\n"
    "REL\tGeorge\tTom\tfather_of\n"
    "REL\tHenry\tGeorge\tfather_of\n";

// Answers "maternal great-grandfather" by walking parent triples found in
// the prompt it is given.
inline MockReply genealogy_responder(const ChatRequest& r) {
    std::string prompt;
    for (const auto& m : r.messages) prompt += m.content + "\n";
    std::map<std::string, std::string> mother, father;
    static const std::regex triple(R"((\w+) (mother_of|father_of) (\w+))");
    for (auto it = std::sregex_iterator(prompt.begin(), prompt.end(), triple); it != std::sregex_iterator(); ++it) {
        ((*it)[2] == "mother_of" ? mother : father)[(*it)[3]] = (*it)[1];
    }
    std::string who = "Jason";
    for (auto* step : {&mother, &father, &father}) {
        auto f = step->find(who);
        if (f == step->end()) return MockReply::ok("unknown");
        who = f->second;
    }
    return MockReply::ok(who);
}

}  // namespace agentic::support
