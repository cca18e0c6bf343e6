#pragma once

#include "nicheck/model.hpp"
#include "nicheck/policy.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nicheck
{

// The `.ni` text format, as written.
struct model_text
{
    system_def def;
    bool implicit_self_loops = false;
    std::vector< std::pair< std::string, std::string > > policy_edges;
    bool policy_closure = false;
};

struct model
{
    system sys;
    policy pol;
};

// Syntax only. Errors carry "line L, column C".
model_text parse_model_text( std::string_view text );

// Parses and validates. Reflexive edges are implied; without `policy-closure: true` the
// listed edges must already be transitive.
model parse_model( std::string_view text );

// Canonical text: every transition explicit, non-reflexive edges of the closed policy.
std::string serialize_model( const system& sys, const policy& pol );

// Bundled examples, looked up by file name ("fig5.ni" or "corpus/fig5.ni").
std::optional< std::string_view > bundled_model( std::string_view name );
std::vector< std::string > bundled_model_names();

// Reads `path` from disk, falling back to the bundled copy of the same file name.
model load_model( const std::string& path );
std::string read_model_text( const std::string& path );

} // namespace nicheck
