#include "nicheck/model_file.hpp"

#include "nicheck/error.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nicheck
{

namespace detail
{
struct bundled_file
{
    std::string_view name;
    std::string_view text;
};
extern const bundled_file bundled_files[];
extern const std::size_t bundled_count;
} // namespace detail

namespace
{

struct piece
{
    std::string_view text;
    std::size_t column; // 1-based
};

[[noreturn]] void fail( std::size_t line, std::size_t column, const std::string& msg )
{
    throw error{ errc::syntax_error, "line " + std::to_string( line ) + ", column " + std::to_string( column ) + ": " +
                                         msg };
}

piece trim( piece p )
{
    std::size_t b = 0, e = p.text.size();
    while ( b < e && std::isspace( static_cast< unsigned char >( p.text[ b ] ) ) )
        ++b;
    while ( e > b && std::isspace( static_cast< unsigned char >( p.text[ e - 1 ] ) ) )
        --e;
    return { p.text.substr( b, e - b ), p.column + b };
}

// Splits on commas outside () and {}.
std::vector< piece > split_items( piece p )
{
    std::vector< piece > out;
    int depth = 0;
    std::size_t start = 0;
    for ( std::size_t i = 0; i <= p.text.size(); ++i )
    {
        char c = i < p.text.size() ? p.text[ i ] : ',';
        if ( c == '(' || c == '{' )
            ++depth;
        else if ( c == ')' || c == '}' )
            --depth;
        else if ( c == ',' && depth <= 0 )
        {
            out.push_back( trim( { p.text.substr( start, i - start ), p.column + start } ) );
            start = i + 1;
        }
    }
    return out;
}

std::vector< piece > split_ws( piece p )
{
    std::vector< piece > out;
    std::size_t i = 0;
    while ( i < p.text.size() )
    {
        while ( i < p.text.size() && std::isspace( static_cast< unsigned char >( p.text[ i ] ) ) )
            ++i;
        std::size_t b = i;
        while ( i < p.text.size() && !std::isspace( static_cast< unsigned char >( p.text[ i ] ) ) )
            ++i;
        if ( i > b )
            out.push_back( { p.text.substr( b, i - b ), p.column + b } );
    }
    return out;
}

bool valid_name( std::string_view s )
{
    if ( s.empty() )
        return false;
    for ( char c : s )
        if ( std::isspace( static_cast< unsigned char >( c ) ) || c == ',' || c == '=' || c == '@' || c == '*' ||
             c == ':' || c == '#' )
            return false;
    return true;
}

std::string name_at( std::size_t line, piece p, std::string_view what )
{
    if ( !valid_name( p.text ) )
        fail( line, p.column, "invalid " + std::string{ what } + " '" + std::string{ p.text } + "'" );
    return std::string{ p.text };
}

bool parse_bool( std::size_t line, piece p )
{
    if ( p.text == "true" )
        return true;
    if ( p.text == "false" )
        return false;
    fail( line, p.column, "expected 'true' or 'false'" );
}

} // namespace

model_text parse_model_text( std::string_view text )
{
    model_text out;
    bool have_system = false;
    bool have_initial = false;
    std::map< std::string, std::string > obs_default; // domain -> value
    std::set< std::pair< std::string, std::string > > obs_explicit;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while ( pos <= text.size() )
    {
        auto nl = text.find( '\n', pos );
        auto raw = text.substr( pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos );
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if ( auto hash = raw.find( '#' ); hash != std::string_view::npos )
            raw = raw.substr( 0, hash );
        if ( !raw.empty() && raw.back() == '\r' )
            raw.remove_suffix( 1 );
        auto line = trim( { raw, 1 } );
        if ( line.text.empty() )
            continue;

        if ( line.text.starts_with( "system" ) &&
             ( line.text.size() == 6 || std::isspace( static_cast< unsigned char >( line.text[ 6 ] ) ) ) )
        {
            if ( have_system )
                fail( line_no, line.column, "duplicate 'system' line" );
            auto name = trim( { line.text.substr( 6 ), line.column + 6 } );
            out.def.name = name_at( line_no, name, "system name" );
            have_system = true;
            continue;
        }
        if ( !have_system )
            fail( line_no, line.column, "expected 'system <name>'" );

        auto colon = line.text.find( ':' );
        if ( colon == std::string_view::npos )
            fail( line_no, line.column, "expected '<keyword>: ...'" );
        auto key = trim( { line.text.substr( 0, colon ), line.column } );
        piece body{ line.text.substr( colon + 1 ), line.column + colon + 1 };

        if ( key.text == "domains" )
        {
            for ( auto item : split_items( body ) )
                out.def.domains.push_back( name_at( line_no, item, "domain name" ) );
        }
        else if ( key.text == "actions" )
        {
            for ( auto item : split_items( body ) )
            {
                auto at = item.text.find( '@' );
                if ( at == std::string_view::npos )
                    fail( line_no, item.column, "expected '<action>@<domain>'" );
                auto a = trim( { item.text.substr( 0, at ), item.column } );
                auto d = trim( { item.text.substr( at + 1 ), item.column + at + 1 } );
                out.def.actions.emplace_back( name_at( line_no, a, "action name" ),
                                              name_at( line_no, d, "domain name" ) );
            }
        }
        else if ( key.text == "states" )
        {
            for ( auto item : split_items( body ) )
            {
                bool initial = item.text.ends_with( '*' );
                if ( initial )
                    item.text.remove_suffix( 1 );
                auto name = name_at( line_no, trim( item ), "state name" );
                if ( initial )
                {
                    if ( have_initial )
                        fail( line_no, item.column, "second initial state '" + name + "'" );
                    out.def.initial = name;
                    have_initial = true;
                }
                out.def.states.push_back( name );
            }
        }
        else if ( key.text.starts_with( "obs" ) )
        {
            auto words = split_ws( key );
            if ( words.size() != 2 || words[ 0 ].text != "obs" )
                fail( line_no, key.column, "expected 'obs <domain>: ...'" );
            auto domain = name_at( line_no, words[ 1 ], "domain name" );
            for ( auto item : split_items( body ) )
            {
                auto eq = item.text.find( '=' );
                if ( eq == std::string_view::npos )
                    fail( line_no, item.column, "expected '<state>=<value>'" );
                auto s = trim( { item.text.substr( 0, eq ), item.column } );
                auto v = trim( { item.text.substr( eq + 1 ), item.column + eq + 1 } );
                if ( v.text.empty() )
                    fail( line_no, v.column, "missing observation value" );
                if ( s.text == "*" )
                {
                    obs_default[ domain ] = std::string{ v.text };
                    continue;
                }
                auto state = name_at( line_no, s, "state name" );
                obs_explicit.emplace( domain, state );
                out.def.observations.push_back( { domain, state, std::string{ v.text } } );
            }
        }
        else if ( key.text == "trans" )
        {
            for ( auto item : split_items( body ) )
            {
                auto words = split_ws( item );
                if ( words.size() != 3 || !words[ 1 ].text.starts_with( '-' ) || !words[ 1 ].text.ends_with( "->" ) ||
                     words[ 1 ].text.size() < 4 )
                    fail( line_no, item.column, "expected '<state> -<action>-> <state>'" );
                piece act{ words[ 1 ].text.substr( 1, words[ 1 ].text.size() - 3 ), words[ 1 ].column + 1 };
                out.def.transitions.push_back( { name_at( line_no, words[ 0 ], "state name" ),
                                                 name_at( line_no, act, "action name" ),
                                                 name_at( line_no, words[ 2 ], "state name" ) } );
            }
        }
        else if ( key.text == "options" )
        {
            for ( auto item : split_items( body ) )
            {
                auto eq = item.text.find( '=' );
                if ( eq == std::string_view::npos )
                    fail( line_no, item.column, "expected '<option>=<value>'" );
                auto k = trim( { item.text.substr( 0, eq ), item.column } );
                auto v = trim( { item.text.substr( eq + 1 ), item.column + eq + 1 } );
                if ( k.text != "implicit_self_loops" )
                    fail( line_no, k.column, "unknown option '" + std::string{ k.text } + "'" );
                out.implicit_self_loops = parse_bool( line_no, v );
            }
        }
        else if ( key.text == "policy" )
        {
            for ( auto item : split_items( body ) )
            {
                auto words = split_ws( item );
                if ( words.size() != 3 || words[ 1 ].text != "->" )
                    fail( line_no, item.column, "expected '<domain> -> <domain>'" );
                out.policy_edges.emplace_back( name_at( line_no, words[ 0 ], "domain name" ),
                                               name_at( line_no, words[ 2 ], "domain name" ) );
            }
        }
        else if ( key.text == "policy-closure" )
        {
            out.policy_closure = parse_bool( line_no, trim( body ) );
        }
        else
            fail( line_no, key.column, "unknown keyword '" + std::string{ key.text } + "'" );
    }
    if ( !have_system )
        fail( 1, 1, "expected 'system <name>'" );
    if ( !have_initial )
        fail( line_no, 1, "no initial state marked with '*'" );

    for ( const auto& [ domain, value ] : obs_default )
        for ( const auto& s : out.def.states )
            if ( !obs_explicit.contains( { domain, s } ) )
                out.def.observations.push_back( { domain, s, value } );
    return out;
}

model parse_model( std::string_view text )
{
    auto mt = parse_model_text( text );
    auto sys = validate_system( mt.def, mt.implicit_self_loops ? self_loops::implicit : self_loops::explicit_only );
    std::vector< edge > edges;
    for ( const auto& [ from, to ] : mt.policy_edges )
    {
        auto u = sys.find_domain( from );
        auto v = sys.find_domain( to );
        if ( !u || !v )
            throw error{ errc::undeclared_identifier,
                         "policy edge mentions undeclared domain '" + ( u ? to : from ) + "'" };
        edges.emplace_back( *u, *v );
    }
    for ( domain_id d = 0; d < sys.num_domains(); ++d )
        edges.emplace_back( d, d );
    auto pol = mt.policy_closure ? closure( sys.num_domains(), edges )
                                 : validate_policy( sys.raw().domain_names, edges );
    return { std::move( sys ), std::move( pol ) };
}

std::string serialize_model( const system& sys, const policy& pol )
{
    std::ostringstream out;
    out << "system " << sys.name() << "\n";
    out << "options: implicit_self_loops=false\n";
    out << "domains: ";
    for ( domain_id d = 0; d < sys.num_domains(); ++d )
        out << ( d ? ", " : "" ) << sys.domain_name( d );
    out << "\nactions: ";
    for ( action_id a = 0; a < sys.num_actions(); ++a )
        out << ( a ? ", " : "" ) << sys.action_name( a ) << "@" << sys.domain_name( sys.domain_of( a ) );
    out << "\nstates: ";
    for ( state_id s = 0; s < sys.num_states(); ++s )
        out << ( s ? ", " : "" ) << sys.state_name( s ) << ( s == sys.initial() ? "*" : "" );
    out << "\n";
    for ( domain_id d = 0; d < sys.num_domains(); ++d )
    {
        out << "obs " << sys.domain_name( d ) << ": ";
        for ( state_id s = 0; s < sys.num_states(); ++s )
            out << ( s ? ", " : "" ) << sys.state_name( s ) << "=" << sys.obs_name( sys.observe( d, s ) );
        out << "\n";
    }
    for ( state_id s = 0; s < sys.num_states(); ++s )
        for ( action_id a = 0; a < sys.num_actions(); ++a )
            for ( auto t : sys.successors( s, a ) )
                out << "trans: " << sys.state_name( s ) << " -" << sys.action_name( a ) << "-> " << sys.state_name( t )
                    << "\n";
    for ( auto [ u, v ] : pol.edges() )
        if ( u != v )
            out << "policy: " << sys.domain_name( u ) << " -> " << sys.domain_name( v ) << "\n";
    out << "policy-closure: true\n";
    return out.str();
}

std::optional< std::string_view > bundled_model( std::string_view name )
{
    auto base = std::filesystem::path{ std::string{ name } }.filename().string();
    for ( std::size_t i = 0; i < detail::bundled_count; ++i )
        if ( detail::bundled_files[ i ].name == base )
            return detail::bundled_files[ i ].text;
    return std::nullopt;
}

std::vector< std::string > bundled_model_names()
{
    std::vector< std::string > out;
    for ( std::size_t i = 0; i < detail::bundled_count; ++i )
        out.emplace_back( detail::bundled_files[ i ].name );
    return out;
}

std::string read_model_text( const std::string& path )
{
    std::ifstream in{ path, std::ios::binary };
    if ( in )
    {
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }
    if ( auto text = bundled_model( path ) )
        return std::string{ *text };
    throw error{ errc::unreadable_file, "cannot read '" + path + "'" };
}

model load_model( const std::string& path )
{
    return parse_model( read_model_text( path ) );
}

} // namespace nicheck
