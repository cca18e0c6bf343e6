#include "nicheck/error.hpp"
#include "nicheck/harness.hpp"
#include "nicheck/model_file.hpp"
#include "nicheck/notions.hpp"
#include "nicheck/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace nicheck;
using nlohmann::json;

namespace
{

struct common
{
    std::string file;
    std::size_t depth = bounds{}.depth;
    std::size_t alpha = bounds{}.alpha;
    std::size_t view = bounds{}.view;
    bool json_out = false;
    bool serial = false;

    [[nodiscard]] check_options options() const
    {
        check_options opt;
        opt.limits = { depth, alpha, view };
        opt.exec = serial ? execution::serial : execution::parallel;
        return opt;
    }
};

void add_bounds( CLI::App* cmd, common& c )
{
    cmd->add_option( "--depth", c.depth, "Run-length bound for GN and P" );
    cmd->add_option( "--alpha-bound", c.alpha, "Length bound for NDI attacker sequences" );
    cmd->add_option( "--view-bound", c.view, "Item bound for NDI victim views" );
    cmd->add_flag( "--serial", c.serial, "Use the serial reference kernels" );
}

std::vector< std::string > split_list( const std::string& text )
{
    std::vector< std::string > out;
    std::stringstream ss( text );
    std::string item;
    while ( std::getline( ss, item, ',' ) )
    {
        auto b = item.find_first_not_of( " \t" );
        auto e = item.find_last_not_of( " \t" );
        if ( b != std::string::npos )
            out.push_back( item.substr( b, e - b + 1 ) );
    }
    return out;
}

domain_set domains_from( const nicheck::system& sys, const std::string& text )
{
    domain_set out;
    for ( const auto& name : split_list( text ) )
    {
        auto d = sys.find_domain( name );
        if ( !d )
            throw error{ errc::unknown_domain, "unknown domain '" + name + "'" };
        out.insert( *d );
    }
    if ( out.empty() )
        throw error{ errc::unknown_domain, "empty domain list" };
    return out;
}

notion notion_from( const std::string& text )
{
    auto n = parse_notion( text );
    if ( !n )
        throw CLI::ValidationError( "--notion", "unknown notion '" + text + "'" );
    return *n;
}

int report_verdicts( const model& m, const std::vector< verdict >& verdicts, bool json_out )
{
    bool secure = std::all_of( verdicts.begin(), verdicts.end(), []( const verdict& v ) { return v.secure(); } );
    if ( json_out )
        std::cout << make_report( m.sys, m.pol, verdicts ).dump( 2 ) << "\n";
    else
    {
        std::cout << "system " << m.sys.name() << "\n";
        for ( const auto& v : verdicts )
            std::cout << render_verdict( v, m.sys ) << "\n";
    }
    return secure ? 0 : 1;
}

int cmd_check( const common& c, const std::vector< std::string >& notions )
{
    auto m = load_model( c.file );
    std::vector< verdict > verdicts;
    for ( const auto& n : notions )
        verdicts.push_back( check( notion_from( n ), m.sys, m.pol, c.options() ) );
    return report_verdicts( m, verdicts, c.json_out );
}

int cmd_profile( const common& c )
{
    auto m = load_model( c.file );
    auto verdicts = profile( m.sys, m.pol, c.options() );
    if ( c.json_out )
        return report_verdicts( m, verdicts, true );
    std::cout << "system " << m.sys.name() << "\n";
    for ( const auto& v : verdicts )
    {
        std::string name{ display_name( v.which ) };
        std::cout << "  " << name << std::string( 8 - std::min< std::size_t >( name.size(), 7 ), ' ' )
                  << ( v.secure() ? "SECURE_UP_TO" : "INSECURE" ) << "\n";
    }
    bool secure = std::all_of( verdicts.begin(), verdicts.end(), []( const verdict& v ) { return v.secure(); } );
    if ( !secure )
    {
        std::cout << "\n";
        for ( const auto& v : verdicts )
            if ( !v.secure() )
                std::cout << render_verdict( v, m.sys ) << "\n";
    }
    return secure ? 0 : 1;
}

int cmd_cuts( const common& c )
{
    auto m = load_model( c.file );
    const auto& sys = m.sys;
    auto cuts = all_cuts( m.pol );
    if ( c.json_out )
    {
        auto cut_json = [ & ]( const std::optional< cut >& ct ) -> json {
            if ( !ct )
                return nullptr;
            json hi = json::array(), lo = json::array();
            for ( auto d : ct->high.members() )
                hi.push_back( sys.domain_name( d ) );
            for ( auto d : ct->low.members() )
                lo.push_back( sys.domain_name( d ) );
            return { { "high", hi }, { "low", lo } };
        };
        json all = json::array(), per = json::array();
        for ( const auto& ct : cuts )
            all.push_back( cut_json( ct ) );
        for ( domain_id u = 0; u < sys.num_domains(); ++u )
            per.push_back( { { "domain", sys.domain_name( u ) },
                             { "high_up", cut_json( high_up_cut( m.pol, u ) ) },
                             { "low_down", cut_json( low_down_cut( m.pol, u ) ) } } );
        std::cout << json{ { "system", sys.name() }, { "cuts", all }, { "pivots", per } }.dump( 2 ) << "\n";
        return 0;
    }
    std::cout << cuts.size() << " cuts of " << sys.name() << "\n";
    for ( const auto& ct : cuts )
        std::cout << "  " << render_cut( sys, ct ) << "\n";
    auto show = [ & ]( const std::optional< cut >& ct ) { return ct ? render_cut( sys, *ct ) : std::string{ "Degenerate" }; };
    for ( domain_id u = 0; u < sys.num_domains(); ++u )
    {
        std::cout << "up(" << sys.domain_name( u ) << ")   = " << show( high_up_cut( m.pol, u ) ) << "\n";
        std::cout << "down(" << sys.domain_name( u ) << ") = " << show( low_down_cut( m.pol, u ) ) << "\n";
    }
    return 0;
}

// Blocks: the coalition, then every other domain on its own.
abstraction coalition_abstraction( const nicheck::system& sys, domain_set coalition )
{
    std::vector< domain_set > blocks{ coalition };
    for ( domain_id d = 0; d < sys.num_domains(); ++d )
        if ( !coalition.contains( d ) )
            blocks.push_back( domain_set{ d } );
    return abstraction{ sys.num_domains(), blocks };
}

int cmd_view( const common& c, const std::string& domains, const std::string& run_text )
{
    auto m = load_model( c.file );
    auto coalition = domains_from( m.sys, domains );
    auto r = parse_run( m.sys, run_text );
    if ( coalition.size() == 1 )
    {
        std::cout << render_view( m.sys, compute_view( m.sys, coalition.members().front(), r ) ) << "\n";
        return 0;
    }
    auto abs_sys = abstract_system( m.sys, coalition_abstraction( m.sys, coalition ) );
    std::cout << render_view( abs_sys, compute_view( abs_sys, 0, r ) ) << "\n";
    return 0;
}

int cmd_abstract( const common& c, const std::string& high, const std::string& low )
{
    auto m = load_model( c.file );
    const auto& sys = m.sys;
    cut ct{ domains_from( sys, high ), {} };
    ct.low = low.empty() ? sys.all_domains() - ct.high : domains_from( sys, low );
    if ( !is_cut( m.pol, ct ) )
    {
        std::cerr << "error: " << render_cut( sys, ct ) << " is not a cut of the policy\n";
        return 2;
    }
    auto abs = to_abstraction( ct, sys.num_domains() );
    auto asys = abstract_system( sys, abs );
    auto apol = abstract_policy( m.pol, abs );
    std::cout << "cut " << render_cut( sys, ct ) << "\n";
    std::cout << "policy:";
    for ( auto [ from, to ] : apol.edges() )
        if ( from != to )
            std::cout << " " << asys.domain_name( from ) << " -> " << asys.domain_name( to );
    std::cout << "\n";
    for ( domain_id d = 0; d < asys.num_domains(); ++d )
    {
        std::cout << "obs " << asys.domain_name( d ) << ":";
        for ( state_id s = 0; s < asys.num_states(); ++s )
            std::cout << ( s ? ", " : " " ) << asys.state_name( s ) << "=" << asys.obs_name( asys.observe( d, s ) );
        std::cout << "\n";
    }
    return 0;
}

int cmd_monotonicity( const common& c, const std::vector< std::string >& notions )
{
    auto m = load_model( c.file );
    std::vector< notion > which;
    for ( const auto& n : notions )
        which.push_back( notion_from( n ) );
    if ( which.empty() )
        which.assign( all_notions.begin(), all_notions.end() - 1 );
    json out = json::array();
    bool flips = false;
    for ( auto n : which )
    {
        auto r = monotonicity_check( m.sys, m.pol, n, c.options() );
        flips = flips || !r.flips.empty();
        if ( c.json_out )
        {
            out.push_back( monotonicity_to_json( r, m.sys ) );
            continue;
        }
        std::cout << display_name( n ) << ": base " << ( r.base.secure() ? "SECURE_UP_TO" : "INSECURE" ) << ", "
                  << r.supersets << " supersets" << ( r.exhaustive ? "" : " (sampled)" ) << ", " << r.flips.size()
                  << " flips" << ( is_monotonic( n ) ? "" : " (not monotonic)" ) << "\n";
        for ( const auto& f : r.flips )
        {
            std::cout << "  adding";
            for ( auto [ from, to ] : f.added )
                std::cout << " (" << m.sys.domain_name( from ) << "," << m.sys.domain_name( to ) << ")";
            std::cout << " -> INSECURE\n";
        }
    }
    if ( c.json_out )
        std::cout << json{ { "system", m.sys.name() }, { "results", out } }.dump( 2 ) << "\n";
    return flips ? 1 : 0;
}

int cmd_random( const common& c, const gen_params& p, bool run_profile )
{
    auto sys = random_system( p );
    auto pol = random_policy( p, sys.num_domains() );
    auto text = serialize_model( sys, pol );
    if ( !run_profile )
    {
        std::cout << text;
        return 0;
    }
    model m{ sys, pol };
    auto verdicts = profile( sys, pol, c.options() );
    if ( !c.json_out )
        std::cout << text << "\n";
    return report_verdicts( m, verdicts, c.json_out );
}

int cmd_verify( const std::string& path )
{
    std::ifstream in( path );
    if ( !in )
        throw error{ errc::unreadable_file, "cannot read '" + path + "'" };
    json report;
    try
    {
        report = json::parse( in );
    }
    catch ( const json::exception& e )
    {
        throw error{ errc::malformed_report, e.what() };
    }
    auto result = verify_report( report );
    for ( const auto& f : result.failures )
        std::cout << "INVALID " << f << "\n";
    std::cout << result.checked << " vulnerabilities checked, " << result.failures.size() << " invalid\n";
    return result.ok() ? 0 : 1;
}

int cmd_lattice( const common& c, std::size_t trials, const gen_params& p, bool corpus )
{
    lattice_report total;
    if ( corpus )
        for ( const auto& name : bundled_model_names() )
        {
            auto m = load_model( name );
            total.merge( lattice_consistency( m.sys, m.pol, c.options(), name ) );
        }
    if ( trials > 0 )
        total.merge( lattice_consistency_check( trials, p, c.options() ) );
    if ( c.json_out )
        std::cout << lattice_to_json( total ).dump( 2 ) << "\n";
    else
    {
        std::cout << total.systems << " systems, " << total.edges_checked << " edges checked, " << total.translations
                  << " translations, " << total.bound_artifacts << " bound artifacts, " << total.violations.size()
                  << " violations\n";
        for ( const auto& v : total.violations )
            std::cout << "  " << v.label << ": " << display_name( v.stronger ) << " -> " << display_name( v.weaker )
                      << ": " << v.reason << "\n";
    }
    return total.violations.empty() ? 0 : 1;
}

void add_gen( CLI::App* cmd, gen_params& p )
{
    cmd->add_option( "--seed", p.seed, "Generator seed" );
    cmd->add_option( "--states", p.max_states, "Maximum number of states" )->check( CLI::PositiveNumber );
    cmd->add_option( "--min-domains", p.min_domains, "Minimum number of domains" )->check( CLI::Range( 2, 16 ) );
    cmd->add_option( "--domains", p.max_domains, "Maximum number of domains" )->check( CLI::Range( 2, 16 ) );
    cmd->add_option( "--actions", p.max_actions_per_domain, "Actions per domain" )->check( CLI::PositiveNumber );
    cmd->add_option( "--observations", p.obs_alphabet_size, "Observation alphabet size" )
        ->check( CLI::PositiveNumber );
    cmd->add_option( "--branching", p.branching, "Maximum successors per transition" )->check( CLI::PositiveNumber );
}

} // namespace

int main( int argc, char** argv )
{
    CLI::App app{ "Noninterference checker for finite input-enabled systems" };
    app.require_subcommand( 1 );
    app.set_version_flag( "--version", "nicheck " + std::to_string( report_format_version ) );

    common c;
    std::vector< std::string > notions;
    std::string domains, run_text, high, low, report_path;
    gen_params gp;
    std::size_t trials = 100;
    bool with_profile = false, no_corpus = false;

    auto* check_cmd = app.add_subcommand( "check", "Check notions on a model" );
    check_cmd->add_option( "file", c.file, "Model file (.ni), or a bundled example name" )->required();
    check_cmd->add_option( "--notion", notions, "Notion: gn-pw, l-gn, h-gn, c-gn, ndi-pw, ndi-sw, l-ndi, h-ndi, c-ndi, p-sec" )
        ->required()
        ->delimiter( ',' );
    check_cmd->add_flag( "--json", c.json_out, "Emit a JSON report" );
    add_bounds( check_cmd, c );

    auto* profile_cmd = app.add_subcommand( "profile", "Check every notion" );
    profile_cmd->add_option( "file", c.file, "Model file" )->required();
    profile_cmd->add_flag( "--json", c.json_out, "Emit a JSON report" );
    add_bounds( profile_cmd, c );

    auto* cuts_cmd = app.add_subcommand( "cuts", "List cuts of the policy" );
    cuts_cmd->add_option( "file", c.file, "Model file" )->required();
    cuts_cmd->add_flag( "--json", c.json_out, "Emit JSON" );

    auto* view_cmd = app.add_subcommand( "view", "Compute the view of a domain or coalition on a run" );
    view_cmd->add_option( "file", c.file, "Model file" )->required();
    view_cmd->add_option( "--domain", domains, "Domain, or comma-separated coalition" )->required();
    view_cmd->add_option( "--run", run_text, "Run as 's0 a s1 b s2'" )->required();

    auto* abstract_cmd = app.add_subcommand( "abstract", "Show the system abstracted by a cut" );
    abstract_cmd->add_option( "file", c.file, "Model file" )->required();
    abstract_cmd->add_option( "--high", high, "High block, comma-separated" )->required();
    abstract_cmd->add_option( "--low", low, "Low block (default: the remaining domains)" );

    auto* mono_cmd = app.add_subcommand( "monotonicity", "Look for verdict flips under larger policies" );
    mono_cmd->add_option( "file", c.file, "Model file" )->required();
    mono_cmd->add_option( "--notion", notions, "Notions (default: all but P)" )->delimiter( ',' );
    mono_cmd->add_flag( "--json", c.json_out, "Emit JSON" );
    add_bounds( mono_cmd, c );

    auto* random_cmd = app.add_subcommand( "random", "Generate a random model" );
    add_gen( random_cmd, gp );
    random_cmd->add_flag( "--profile", with_profile, "Also check every notion on it" );
    random_cmd->add_flag( "--json", c.json_out, "Emit the profile as JSON" );
    add_bounds( random_cmd, c );

    auto* verify_cmd = app.add_subcommand( "verify-witness", "Re-validate every vulnerability in a JSON report" );
    verify_cmd->add_option( "report", report_path, "JSON report" )->required();

    auto* lattice_cmd = app.add_subcommand( "lattice", "Check the implication lattice on the corpus and random models" );
    lattice_cmd->add_option( "--trials", trials, "Random models" );
    lattice_cmd->add_flag( "--no-corpus", no_corpus, "Skip the bundled examples" );
    lattice_cmd->add_flag( "--json", c.json_out, "Emit JSON" );
    add_gen( lattice_cmd, gp );
    add_bounds( lattice_cmd, c );

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::ParseError& e )
    {
        int rc = app.exit( e );
        return rc == 0 ? 0 : 2;
    }

    try
    {
        if ( *check_cmd )
            return cmd_check( c, notions );
        if ( *profile_cmd )
            return cmd_profile( c );
        if ( *cuts_cmd )
            return cmd_cuts( c );
        if ( *view_cmd )
            return cmd_view( c, domains, run_text );
        if ( *abstract_cmd )
            return cmd_abstract( c, high, low );
        if ( *mono_cmd )
            return cmd_monotonicity( c, notions );
        if ( *random_cmd )
            return cmd_random( c, gp, with_profile );
        if ( *verify_cmd )
            return cmd_verify( report_path );
        if ( *lattice_cmd )
            return cmd_lattice( c, trials, gp, !no_corpus );
    }
    catch ( const CLI::ValidationError& e )
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch ( const error& e )
    {
        std::cerr << "error: " << to_string( e.code() ) << ": " << e.what() << "\n";
        return 2;
    }
    return 2;
}
