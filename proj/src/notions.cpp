#include "nicheck/notions.hpp"

#include "nicheck/analysis.hpp"
#include "nicheck/error.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <set>

namespace nicheck
{

namespace
{

struct notion_info
{
    notion n;
    std::string_view display;
    std::string_view cli;
};

constexpr std::array< notion_info, 10 > infos = { {
    { notion::gn_pw, "GN_pw", "gn-pw" },
    { notion::l_gn, "L-GN", "l-gn" },
    { notion::h_gn, "H-GN", "h-gn" },
    { notion::c_gn, "C-GN", "c-gn" },
    { notion::ndi_pw, "NDI_pw", "ndi-pw" },
    { notion::ndi_sw, "NDI_sw", "ndi-sw" },
    { notion::l_ndi, "L-NDI", "l-ndi" },
    { notion::h_ndi, "H-NDI", "h-ndi" },
    { notion::c_ndi, "C-NDI", "c-ndi" },
    { notion::p_sec, "P", "p-sec" },
} };

constexpr std::array< std::pair< notion, notion >, 14 > hasse = { {
    { notion::c_gn, notion::l_gn },
    { notion::h_gn, notion::l_gn },
    { notion::h_gn, notion::c_gn },
    { notion::c_gn, notion::h_gn },
    { notion::l_gn, notion::gn_pw },
    { notion::gn_pw, notion::ndi_sw },
    { notion::ndi_sw, notion::ndi_pw },
    { notion::c_ndi, notion::l_ndi },
    { notion::c_ndi, notion::h_ndi },
    { notion::l_ndi, notion::ndi_sw },
    { notion::h_ndi, notion::ndi_pw },
    { notion::c_gn, notion::c_ndi },
    { notion::h_gn, notion::h_ndi },
    { notion::l_gn, notion::l_ndi },
} };

template < typename T >
void atomic_min( std::atomic< T >& target, T value )
{
    T current = target.load();
    while ( value < current && !target.compare_exchange_weak( current, value ) )
    {
    }
}

std::vector< action_id > concat( std::span< const action_id > a, std::span< const action_id > b )
{
    std::vector< action_id > out( a.begin(), a.end() );
    out.insert( out.end(), b.begin(), b.end() );
    return out;
}

// Every sequence over `alphabet` with at most `max_len` elements, length-lexicographic.
std::vector< std::vector< action_id > > sequences_up_to( std::span< const action_id > alphabet, std::size_t max_len )
{
    std::vector< std::vector< action_id > > out{ {} };
    std::size_t level_begin = 0;
    for ( std::size_t len = 1; len <= max_len && !alphabet.empty(); ++len )
    {
        std::size_t level_end = out.size();
        for ( std::size_t i = level_begin; i < level_end; ++i )
            for ( auto a : alphabet )
            {
                auto next = out[ i ];
                next.push_back( a );
                out.push_back( std::move( next ) );
            }
        level_begin = level_end;
    }
    return out;
}

// ---- GN ----

struct gn_item
{
    run r;
    view beta;
};

std::optional< gn_vulnerability > first_plus( const system& sys, std::span< const action_id > inserts, domain_id victim,
                                              const gn_item& item )
{
    const auto& seq = item.r.actions;
    for ( std::size_t i = 0; i <= seq.size(); ++i )
        for ( auto a : inserts )
        {
            std::vector< action_id > cand( seq.begin(), seq.begin() + static_cast< std::ptrdiff_t >( i ) );
            cand.push_back( a );
            cand.insert( cand.end(), seq.begin() + static_cast< std::ptrdiff_t >( i ), seq.end() );
            if ( !exists_run_with_view( sys, cand, victim, item.beta ).compatible )
                return gn_vulnerability{ victim,
                                         { seq.begin(), seq.begin() + static_cast< std::ptrdiff_t >( i ) },
                                         a,
                                         { seq.begin() + static_cast< std::ptrdiff_t >( i ), seq.end() },
                                         item.beta,
                                         gn_direction::plus,
                                         item.r };
        }
    return std::nullopt;
}

std::optional< gn_vulnerability > first_minus( const system& sys, domain_id source, domain_id victim,
                                               const gn_item& item )
{
    const auto& seq = item.r.actions;
    for ( std::size_t i = 0; i < seq.size(); ++i )
    {
        if ( sys.domain_of( seq[ i ] ) != source )
            continue;
        std::vector< action_id > cand = seq;
        cand.erase( cand.begin() + static_cast< std::ptrdiff_t >( i ) );
        if ( !exists_run_with_view( sys, cand, victim, item.beta ).compatible )
            return gn_vulnerability{ victim,
                                     { seq.begin(), seq.begin() + static_cast< std::ptrdiff_t >( i ) },
                                     seq[ i ],
                                     { seq.begin() + static_cast< std::ptrdiff_t >( i + 1 ), seq.end() },
                                     item.beta,
                                     gn_direction::minus,
                                     item.r };
    }
    return std::nullopt;
}

// First insertion and first deletion vulnerability for one (source, victim) pair, in
// canonical run order; the earlier of the two comes first.
std::vector< gn_vulnerability > scan_gn_pair( const system& sys, domain_id source, domain_id victim,
                                              const check_options& opt )
{
    std::vector< gn_item > items;
    std::set< std::pair< std::vector< action_id >, view > > seen;
    for_each_run( sys, opt.limits.depth, [ & ]( const run& r ) {
        auto beta = compute_view( sys, victim, r );
        if ( seen.emplace( r.actions, beta ).second )
            items.push_back( { r, std::move( beta ) } );
        return true;
    } );
    auto inserts = sys.actions_of( source );
    const std::size_t n = items.size();

    std::vector< std::optional< gn_vulnerability > > plus( n ), minus( n );
    std::size_t plus_at = n, minus_at = n;
    if ( opt.exec == execution::serial )
    {
        for ( std::size_t i = 0; i < n && ( plus_at == n || minus_at == n ); ++i )
        {
            if ( plus_at == n && ( plus[ i ] = first_plus( sys, inserts, victim, items[ i ] ) ) )
                plus_at = i;
            if ( minus_at == n && ( minus[ i ] = first_minus( sys, source, victim, items[ i ] ) ) )
                minus_at = i;
        }
    }
    else
    {
        std::atomic< std::size_t > best_plus{ n }, best_minus{ n };
#pragma omp parallel for schedule( dynamic, 4 )
        for ( std::ptrdiff_t k = 0; k < static_cast< std::ptrdiff_t >( n ); ++k )
        {
            auto i = static_cast< std::size_t >( k );
            if ( i < best_plus.load() && ( plus[ i ] = first_plus( sys, inserts, victim, items[ i ] ) ) )
                atomic_min( best_plus, i );
            if ( i < best_minus.load() && ( minus[ i ] = first_minus( sys, source, victim, items[ i ] ) ) )
                atomic_min( best_minus, i );
        }
        plus_at = best_plus;
        minus_at = best_minus;
    }

    std::vector< gn_vulnerability > out;
    if ( plus_at < n && plus_at <= minus_at )
        out.push_back( *plus[ plus_at ] );
    if ( minus_at < n )
        out.push_back( *minus[ minus_at ] );
    if ( plus_at < n && plus_at > minus_at )
        out.push_back( *plus[ plus_at ] );
    return out;
}

std::vector< vulnerability > wrap( const system& sys, const policy& pol, std::optional< cut > where,
                                   std::vector< vulnerability_detail > details )
{
    std::vector< vulnerability > out;
    for ( auto& d : details )
        out.push_back( vulnerability{ sys, pol, where, std::move( d ) } );
    return out;
}

// Forbidden pairs (source, victim): victims in canonical order, then sources.
std::vector< edge > forbidden_pairs( const policy& pol )
{
    std::vector< edge > out;
    for ( domain_id victim = 0; victim < pol.size(); ++victim )
        for ( domain_id source = 0; source < pol.size(); ++source )
            if ( !pol.allows( source, victim ) )
                out.emplace_back( source, victim );
    return out;
}

std::vector< vulnerability_detail > scan_gn_pw( const system& sys, const policy& pol, const check_options& opt )
{
    for ( auto [ source, victim ] : forbidden_pairs( pol ) )
    {
        auto found = scan_gn_pair( sys, source, victim, opt );
        if ( !found.empty() )
            return { found.begin(), found.end() };
    }
    return {};
}

// ---- NDI ----

std::optional< ndi_vulnerability > scan_ndi( const system& sys, domain_id victim, domain_set attackers,
                                             const check_options& opt )
{
    auto alphas = sequences_up_to( sys.actions_of( attackers ), opt.limits.alpha );
    auto betas = views_up_to_length( sys, victim, opt.limits.view );
    const std::size_t nb = betas.size();
    const std::size_t n = alphas.size() * nb;
    auto fails = [ & ]( std::size_t q ) {
        return !compatible( sys, attackers, alphas[ q / nb ], victim, betas[ q % nb ] );
    };

    std::size_t found = n;
    if ( opt.exec == execution::serial )
    {
        for ( std::size_t q = 0; q < n; ++q )
            if ( fails( q ) )
            {
                found = q;
                break;
            }
    }
    else
    {
        std::atomic< std::size_t > best{ n };
#pragma omp parallel for schedule( dynamic, 16 )
        for ( std::ptrdiff_t k = 0; k < static_cast< std::ptrdiff_t >( n ); ++k )
        {
            auto q = static_cast< std::size_t >( k );
            if ( q < best.load() && fails( q ) )
                atomic_min( best, q );
        }
        found = best;
    }
    if ( found == n )
        return std::nullopt;
    return ndi_vulnerability{ victim, attackers, alphas[ found / nb ], betas[ found % nb ] };
}

std::vector< vulnerability_detail > scan_ndi_sw( const system& sys, const policy& pol, const check_options& opt )
{
    for ( domain_id victim = 0; victim < pol.size(); ++victim )
    {
        auto attackers = pol.noninterferers( victim );
        if ( attackers.empty() )
            continue;
        if ( auto v = scan_ndi( sys, victim, attackers, opt ) )
            return { *v };
    }
    return {};
}

verdict make_verdict( notion n, const check_options& opt, std::vector< vulnerability > findings )
{
    return verdict{ n, opt.limits, std::move( findings ) };
}

notion family_notion( base_notion base, cut_family family )
{
    switch ( family )
    {
    case cut_family::all:
        return base == base_notion::gn ? notion::c_gn : notion::c_ndi;
    case cut_family::high_up:
        return base == base_notion::gn ? notion::h_gn : notion::h_ndi;
    case cut_family::low_down:
        return base == base_notion::gn ? notion::l_gn : notion::l_ndi;
    }
    return notion::c_gn;
}

state_id final_state( const system& sys, std::span< const action_id > seq )
{
    state_id s = sys.initial();
    for ( auto a : seq )
        s = sys.successors( s, a ).front();
    return s;
}

} // namespace

std::string_view display_name( notion n )
{
    return infos[ static_cast< std::size_t >( n ) ].display;
}

std::string_view cli_name( notion n )
{
    return infos[ static_cast< std::size_t >( n ) ].cli;
}

std::optional< notion > parse_notion( std::string_view text )
{
    for ( const auto& info : infos )
        if ( text == info.cli || text == info.display )
            return info.n;
    if ( text == "p" || text == "P-sec" )
        return notion::p_sec;
    return std::nullopt;
}

bool is_gn( notion n )
{
    return n == notion::gn_pw || n == notion::l_gn || n == notion::h_gn || n == notion::c_gn;
}

bool is_ndi( notion n )
{
    return n == notion::ndi_pw || n == notion::ndi_sw || n == notion::l_ndi || n == notion::h_ndi ||
           n == notion::c_ndi;
}

bool is_monotonic( notion n )
{
    return n != notion::l_gn && n != notion::l_ndi && n != notion::h_ndi;
}

std::span< const std::pair< notion, notion > > lattice_edges()
{
    return hasse;
}

std::vector< std::pair< notion, notion > > lattice_closure()
{
    constexpr std::size_t n = all_notions.size();
    std::array< std::array< bool, n >, n > reach{};
    for ( auto [ x, y ] : hasse )
        reach[ static_cast< std::size_t >( x ) ][ static_cast< std::size_t >( y ) ] = true;
    for ( std::size_t k = 0; k < n; ++k )
        for ( std::size_t i = 0; i < n; ++i )
            for ( std::size_t j = 0; j < n; ++j )
                if ( reach[ i ][ k ] && reach[ k ][ j ] )
                    reach[ i ][ j ] = true;
    std::vector< std::pair< notion, notion > > out;
    for ( std::size_t i = 0; i < n; ++i )
        for ( std::size_t j = 0; j < n; ++j )
            if ( i != j && reach[ i ][ j ] )
                out.emplace_back( all_notions[ i ], all_notions[ j ] );
    return out;
}

std::vector< action_id > gn_vulnerability::witness_sequence() const
{
    return witness.actions;
}

std::vector< action_id > gn_vulnerability::missing_sequence() const
{
    if ( direction == gn_direction::minus )
        return concat( alpha0, alpha1 );
    auto out = alpha0;
    out.push_back( a );
    out.insert( out.end(), alpha1.begin(), alpha1.end() );
    return out;
}

verdict check_gn_pair( const system& sys, const policy& pol, domain_id source, domain_id victim,
                       const check_options& opt )
{
    if ( source >= pol.size() || victim >= pol.size() )
        throw error{ errc::unknown_domain, "domain index out of range" };
    if ( pol.allows( source, victim ) )
        throw error{ errc::policy_edge_present, "policy allows '" + sys.domain_name( source ) + "' -> '" +
                                                    sys.domain_name( victim ) + "'" };
    auto found = scan_gn_pair( sys, source, victim, opt );
    return make_verdict( notion::gn_pw, opt,
                         wrap( sys, pol, std::nullopt, { found.begin(), found.end() } ) );
}

verdict check_gn_pw( const system& sys, const policy& pol, const check_options& opt )
{
    return make_verdict( notion::gn_pw, opt, wrap( sys, pol, std::nullopt, scan_gn_pw( sys, pol, opt ) ) );
}

verdict check_ndi_pw( const system& sys, const policy& pol, const check_options& opt )
{
    for ( auto [ source, victim ] : forbidden_pairs( pol ) )
        if ( auto v = scan_ndi( sys, victim, domain_set{ source }, opt ) )
            return make_verdict( notion::ndi_pw, opt, wrap( sys, pol, std::nullopt, { *v } ) );
    return make_verdict( notion::ndi_pw, opt, {} );
}

verdict check_ndi_sw( const system& sys, const policy& pol, const check_options& opt )
{
    return make_verdict( notion::ndi_sw, opt, wrap( sys, pol, std::nullopt, scan_ndi_sw( sys, pol, opt ) ) );
}

std::vector< cut > family_cuts( const policy& pol, cut_family family )
{
    if ( family == cut_family::all )
        return all_cuts( pol );
    std::vector< cut > out;
    for ( domain_id u = 0; u < pol.size(); ++u )
    {
        auto c = family == cut_family::high_up ? high_up_cut( pol, u ) : low_down_cut( pol, u );
        if ( c && std::find( out.begin(), out.end(), *c ) == out.end() )
            out.push_back( *c );
    }
    return out;
}

verdict check_cut_family( const system& sys, const policy& pol, base_notion base, cut_family family,
                          const check_options& opt )
{
    auto n = family_notion( base, family );
    for ( const auto& c : family_cuts( pol, family ) )
    {
        auto abs = to_abstraction( c, sys.num_domains() );
        auto asys = abstract_system( sys, abs );
        auto apol = abstract_policy( pol, abs );
        auto found = base == base_notion::gn ? scan_gn_pw( asys, apol, opt ) : scan_ndi_sw( asys, apol, opt );
        if ( !found.empty() )
            return make_verdict( n, opt, wrap( asys, apol, c, std::move( found ) ) );
    }
    return make_verdict( n, opt, {} );
}

std::vector< action_id > purge( const system& sys, const policy& pol, domain_id u, std::span< const action_id > seq )
{
    std::vector< action_id > out;
    for ( auto a : seq )
        if ( pol.allows( sys.domain_of( a ), u ) )
            out.push_back( a );
    return out;
}

verdict check_p_secure( const system& sys, const policy& pol, const check_options& opt )
{
    if ( !sys.deterministic() )
        throw error{ errc::not_deterministic, "P-security needs a deterministic system" };
    std::vector< action_id > everything( sys.num_actions() );
    for ( action_id a = 0; a < sys.num_actions(); ++a )
        everything[ a ] = a;
    auto seqs = sequences_up_to( everything, opt.limits.depth );
    std::vector< state_id > finals;
    finals.reserve( seqs.size() );
    for ( const auto& s : seqs )
        finals.push_back( final_state( sys, s ) );

    for ( domain_id u = 0; u < sys.num_domains(); ++u )
    {
        std::map< std::vector< action_id >, std::size_t > first_of_class;
        for ( std::size_t i = 0; i < seqs.size(); ++i )
        {
            auto [ it, fresh ] = first_of_class.emplace( purge( sys, pol, u, seqs[ i ] ), i );
            if ( fresh )
                continue;
            if ( sys.observe( u, finals[ it->second ] ) != sys.observe( u, finals[ i ] ) )
                return make_verdict( notion::p_sec, opt,
                                     wrap( sys, pol, std::nullopt, { p_vulnerability{ u, seqs[ it->second ], seqs[ i ] } } ) );
        }
    }
    return make_verdict( notion::p_sec, opt, {} );
}

verdict check( notion n, const system& sys, const policy& pol, const check_options& opt )
{
    switch ( n )
    {
    case notion::gn_pw:
        return check_gn_pw( sys, pol, opt );
    case notion::l_gn:
        return check_cut_family( sys, pol, base_notion::gn, cut_family::low_down, opt );
    case notion::h_gn:
        return check_cut_family( sys, pol, base_notion::gn, cut_family::high_up, opt );
    case notion::c_gn:
        return check_cut_family( sys, pol, base_notion::gn, cut_family::all, opt );
    case notion::ndi_pw:
        return check_ndi_pw( sys, pol, opt );
    case notion::ndi_sw:
        return check_ndi_sw( sys, pol, opt );
    case notion::l_ndi:
        return check_cut_family( sys, pol, base_notion::ndi, cut_family::low_down, opt );
    case notion::h_ndi:
        return check_cut_family( sys, pol, base_notion::ndi, cut_family::high_up, opt );
    case notion::c_ndi:
        return check_cut_family( sys, pol, base_notion::ndi, cut_family::all, opt );
    case notion::p_sec:
        return check_p_secure( sys, pol, opt );
    }
    throw error{ errc::unknown_domain, "unknown notion" };
}

std::vector< verdict > profile( const system& sys, const policy& pol, const check_options& opt )
{
    std::vector< verdict > out;
    for ( auto n : all_notions )
        if ( n != notion::p_sec || sys.deterministic() )
            out.push_back( check( n, sys, pol, opt ) );
    return out;
}

namespace
{

std::optional< std::string > revalidate_gn( const system& sys, const policy& pol, const gn_vulnerability& v )
{
    if ( v.victim >= sys.num_domains() || v.a >= sys.num_actions() )
        return "identifier out of range";
    if ( pol.allows( sys.domain_of( v.a ), v.victim ) )
        return "policy allows the domain of the inserted or deleted action to interfere with the victim";
    if ( !is_valid_run( sys, v.witness ) )
        return "witness is not a run of the system";
    auto expected = v.direction == gn_direction::plus ? concat( v.alpha0, v.alpha1 ) : [ & ] {
        auto s = v.alpha0;
        s.push_back( v.a );
        s.insert( s.end(), v.alpha1.begin(), v.alpha1.end() );
        return s;
    }();
    if ( v.witness.actions != expected )
        return "witness actions do not match the vulnerability";
    if ( compute_view( sys, v.victim, v.witness ) != v.beta )
        return "witness view differs from the recorded view";
    if ( exists_run_with_view( sys, v.missing_sequence(), v.victim, v.beta ).compatible )
        return "a run on the modified sequence yields the recorded view";
    return std::nullopt;
}

std::optional< std::string > revalidate_ndi( const system& sys, const policy& pol, const ndi_vulnerability& v )
{
    if ( v.victim >= sys.num_domains() )
        return "identifier out of range";
    if ( v.attackers.empty() || !v.attackers.subset_of( pol.noninterferers( v.victim ) ) )
        return "attackers are not noninterferers of the victim";
    for ( auto a : v.alpha )
        if ( a >= sys.num_actions() || !v.attackers.contains( sys.domain_of( a ) ) )
            return "attacker sequence contains a foreign action";
    if ( !is_well_formed_view( sys, v.victim, v.beta ) || !run_with_view( sys, v.victim, v.beta ) )
        return "view is not attainable";
    if ( compatible( sys, v.attackers, v.alpha, v.victim, v.beta ) )
        return "attacker sequence is compatible with the view";
    return std::nullopt;
}

std::optional< std::string > revalidate_p( const system& sys, const policy& pol, const p_vulnerability& v )
{
    if ( !sys.deterministic() )
        return "system is not deterministic";
    if ( v.victim >= sys.num_domains() )
        return "identifier out of range";
    for ( const auto* seq : { &v.first, &v.second } )
        for ( auto a : *seq )
            if ( a >= sys.num_actions() )
                return "identifier out of range";
    if ( purge( sys, pol, v.victim, v.first ) != purge( sys, pol, v.victim, v.second ) )
        return "purges differ";
    if ( sys.observe( v.victim, final_state( sys, v.first ) ) == sys.observe( v.victim, final_state( sys, v.second ) ) )
        return "final observations agree";
    return std::nullopt;
}

} // namespace

std::optional< std::string > revalidate( const vulnerability& v )
{
    if ( v.pol.size() != v.sys.num_domains() )
        return "policy and system disagree on the domains";
    return std::visit(
        [ & ]( const auto& d ) -> std::optional< std::string > {
            using T = std::decay_t< decltype( d ) >;
            if constexpr ( std::is_same_v< T, gn_vulnerability > )
                return revalidate_gn( v.sys, v.pol, d );
            else if constexpr ( std::is_same_v< T, ndi_vulnerability > )
                return revalidate_ndi( v.sys, v.pol, d );
            else
                return revalidate_p( v.sys, v.pol, d );
        },
        v.detail );
}

bool within_bounds( const vulnerability& v, const bounds& limits )
{
    return std::visit(
        [ & ]( const auto& d ) {
            using T = std::decay_t< decltype( d ) >;
            if constexpr ( std::is_same_v< T, gn_vulnerability > )
                return d.witness.length() <= limits.depth;
            else if constexpr ( std::is_same_v< T, ndi_vulnerability > )
                return d.alpha.size() <= limits.alpha && d.beta.size() <= limits.view;
            else
                return d.first.size() <= limits.depth && d.second.size() <= limits.depth;
        },
        v.detail );
}

} // namespace nicheck
