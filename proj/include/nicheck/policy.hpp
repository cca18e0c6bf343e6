#pragma once

#include "nicheck/model.hpp"

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nicheck
{

using edge = std::pair< domain_id, domain_id >;

// A relation u ↦ v ("u may interfere with v") over the domains 0..n-1 of a system.
// Validated policies are reflexive and transitive; abstracted ones need not be transitive.
class policy
{
    std::vector< domain_set > _succ; // _succ[u] = { v : u ↦ v }

public:
    policy() = default;
    explicit policy( std::vector< domain_set > successors ) : _succ{ std::move( successors ) } {}

    [[nodiscard]] std::size_t size() const { return _succ.size(); }
    [[nodiscard]] bool allows( domain_id from, domain_id to ) const { return _succ[ from ].contains( to ); }

    // u^↦, ^↦u and ^↦̸u.
    [[nodiscard]] domain_set successors( domain_id u ) const;
    [[nodiscard]] domain_set interferers( domain_id u ) const;
    [[nodiscard]] domain_set noninterferers( domain_id u ) const;

    [[nodiscard]] std::vector< edge > edges() const;
    [[nodiscard]] bool is_reflexive() const;
    [[nodiscard]] bool is_transitive() const;
    [[nodiscard]] bool contains( const policy& other ) const;

    friend bool operator==( const policy&, const policy& ) = default;
};

policy validate_policy( std::span< const std::string > domains, std::span< const edge > edges );

// Least reflexive transitive relation containing `edges`.
policy closure( std::size_t num_domains, std::span< const edge > edges );

domain_set successors( const policy& p, domain_id u );
domain_set interferers( const policy& p, domain_id u );
domain_set noninterferers( const policy& p, domain_id u );

// A partition of the domains 0..n-1 into nonempty blocks.
class abstraction
{
    std::vector< domain_set > _blocks;
    std::vector< std::size_t > _block_of;

public:
    abstraction( std::size_t num_domains, std::vector< domain_set > blocks );

    [[nodiscard]] std::size_t num_domains() const { return _block_of.size(); }
    [[nodiscard]] const std::vector< domain_set >& blocks() const { return _blocks; }
    [[nodiscard]] std::size_t block_of( domain_id d ) const { return _block_of[ d ]; }
};

abstraction singleton_abstraction( std::size_t num_domains );

// A two-block abstraction (high, low) with no high ↦ low edge.
struct cut
{
    domain_set high;
    domain_set low;

    friend auto operator<=>( const cut&, const cut& ) = default;
};

bool is_cut( const policy& p, const cut& c );
abstraction to_abstraction( const cut& c, std::size_t num_domains );

// ↑u = (u^↦, D ∖ u^↦) and ↓u = (D ∖ ^↦u, ^↦u); nullopt when a block would be empty.
std::optional< cut > high_up_cut( const policy& p, domain_id u );
std::optional< cut > low_down_cut( const policy& p, domain_id u );

// Every cut, ordered by the bit pattern of the high block. Exhaustive over 2^|D| subsets.
std::vector< cut > all_cuts( const policy& p );

policy abstract_policy( const policy& p, const abstraction& abs );
system abstract_system( const system& sys, const abstraction& abs );

// Block of `sys` standing for exactly the base domains in `ds` (abstracted systems only
// record member names, so the lookup goes through the base system).
std::optional< domain_id > find_block( const system& abstracted, const system& base, domain_set ds );
domain_set members_in( const system& abstracted, domain_id block, const system& base );

// Projects a view of block G in `from` down to the view of sub-block F in `to`.
view project_view( const system& from, domain_id g, const view& v, const system& to, domain_id f );

std::string render_domain_set( const system& sys, domain_set ds );
std::string render_cut( const system& sys, const cut& c );

} // namespace nicheck
