#pragma once

#include "bridge.hpp"

#include <memory>
#include <random>

namespace symdel
{

// Size limits for random instances.
struct bounds
{
    std::size_t vocabulary = 4;
    std::size_t added = 2;
    std::size_t modified = 2;
    std::size_t agents = 2;
    std::size_t worlds = 6;
    std::size_t events = 3;
};

// Deterministic random source; draws are taken from the raw 64-bit stream so
// that the same seed gives the same instance on every platform.
class random_source
{
    std::mt19937_64 _gen;

public:
    explicit random_source( std::uint64_t seed ) : _gen{ seed } {}

    std::size_t below( std::size_t n ) { return n == 0 ? 0 : static_cast< std::size_t >( _gen() % n ); }
    bool chance( std::size_t num, std::size_t den ) { return below( den ) < num; }

    template < typename T >
    const T& pick( std::span< const T > xs )
    {
        return xs[ below( xs.size() ) ];
    }

    valuation subset( std::span< const std::string > xs )
    {
        valuation out;
        for ( const auto& x : xs )
            if ( chance( 1, 2 ) )
                out.insert( x );
        return out;
    }

    std::vector< bool > table( std::size_t vars, std::size_t num = 1, std::size_t den = 2 )
    {
        std::vector< bool > out( std::size_t{ 1 } << vars );
        for ( auto&& b : out )
            b = chance( num, den );
        return out;
    }
};

// Function with the given truth table; bit k of the row index is vars[k].
inline bool_fn from_table( bdd_manager& mgr, std::span< const var_id > vars, const std::vector< bool >& rows )
{
    std::vector< bool_fn > layer;
    for ( bool b : rows )
        layer.push_back( mgr.constant( b ) );
    // combine the highest index variable last
    for ( std::size_t k = 0; k < vars.size(); ++k )
    {
        std::vector< bool_fn > next;
        auto v = mgr.var( vars[ k ] );
        for ( std::size_t i = 0; i < layer.size(); i += 2 )
            next.push_back( mgr.ite( v, layer[ i + 1 ], layer[ i ] ) );
        layer = std::move( next );
    }
    return layer.front();
}

// Disjunctive normal form of a truth table over the given atom names.
inline formula dnf_of_table( std::span< const std::string > atoms, const std::vector< bool >& rows )
{
    std::vector< formula > terms;
    for ( std::size_t r = 0; r < rows.size(); ++r )
    {
        if ( !rows[ r ] )
            continue;
        std::vector< formula > lits;
        for ( std::size_t k = 0; k < atoms.size(); ++k )
        {
            auto a = formula::atom( atoms[ k ] );
            lits.push_back( ( r >> k ) & 1u ? a : formula::negation( a ) );
        }
        terms.push_back( formula::conjunction( std::move( lits ) ) );
    }
    return formula::disjunction( std::move( terms ) );
}

inline formula random_boolean( random_source& rng, std::span< const std::string > atoms, std::size_t size )
{
    if ( atoms.empty() )
        return rng.chance( 1, 2 ) ? formula::top() : formula::bot();
    if ( size <= 1 || rng.chance( 1, 4 ) )
    {
        auto a = formula::atom( rng.pick( atoms ) );
        switch ( rng.below( 6 ) )
        {
        case 0: return formula::negation( a );
        case 1: return rng.chance( 1, 2 ) ? formula::top() : formula::bot();
        default: return a;
        }
    }
    auto left = 1 + rng.below( size - 1 );
    auto lhs = random_boolean( rng, atoms, left );
    auto rhs = random_boolean( rng, atoms, size - left );
    switch ( rng.below( 5 ) )
    {
    case 0: return formula::conjunction( { lhs, rhs } );
    case 1: return formula::disjunction( { lhs, rhs } );
    case 2: return formula::implication( lhs, rhs );
    case 3: return formula::equivalence( lhs, rhs );
    default: return formula::negation( formula::conjunction( { lhs, rhs } ) );
    }
}

// Random formula of modal depth at most `depth`.
inline formula random_formula( random_source& rng, std::span< const std::string > atoms,
                               std::span< const std::string > agents, std::size_t depth, std::size_t size )
{
    if ( depth == 0 || agents.empty() )
        return random_boolean( rng, atoms, std::min< std::size_t >( size, 3 ) );
    if ( size <= 1 )
        return formula::box( rng.pick( agents ), random_boolean( rng, atoms, 2 ) );
    switch ( rng.below( 5 ) )
    {
    case 0:
    case 1: return formula::box( rng.pick( agents ), random_formula( rng, atoms, agents, depth - 1, size - 1 ) );
    case 2: return formula::negation( random_formula( rng, atoms, agents, depth, size - 1 ) );
    default: {
        auto left = 1 + rng.below( size - 1 );
        auto lhs = random_formula( rng, atoms, agents, depth, left );
        auto rhs = random_formula( rng, atoms, agents, rng.below( depth + 1 ), size - left );
        switch ( rng.below( 4 ) )
        {
        case 0: return formula::conjunction( { lhs, rhs } );
        case 1: return formula::disjunction( { lhs, rhs } );
        case 2: return formula::implication( lhs, rhs );
        default: return formula::equivalence( lhs, rhs );
        }
    }
    }
}

namespace detail
{

inline const std::vector< std::string > prop_pool{ "p", "q", "r", "s", "t", "u", "v", "w" };
inline const std::vector< std::string > event_pool{ "x", "y", "z" };
inline const std::vector< std::string > agent_pool{ "a", "b", "c", "e" };

inline std::vector< std::string > take( const std::vector< std::string >& pool, std::size_t n )
{
    if ( n > pool.size() )
        throw error( "bounds exceed the name pool" );
    return { pool.begin(), pool.begin() + static_cast< std::ptrdiff_t >( n ) };
}

} // namespace detail

struct scene_instance
{
    std::uint64_t seed;
    std::shared_ptr< bdd_manager > engine;
    scene initial;
    event ev;
    bool executable;
};

// A random scene (law and observations drawn as truth tables) over a random
// vocabulary; the actual state always satisfies the law.
inline scene random_scene( random_source& rng, bdd_manager& mgr, const bounds& b )
{
    auto names = detail::take( detail::prop_pool, 1 + rng.below( b.vocabulary ) );
    auto agents = detail::take( detail::agent_pool, 1 + rng.below( b.agents ) );
    std::vector< var_id > vars, both;
    for ( const auto& p : names )
        vars.push_back( mgr.declare( p ) );
    both = vars;
    for ( auto v : vars )
        both.push_back( mgr.primed( v ) );

    auto state = rng.subset( names );
    auto rows = rng.table( vars.size(), 1 + rng.below( 3 ), 4 );
    std::size_t actual = 0;
    for ( std::size_t k = 0; k < names.size(); ++k )
        if ( state.contains( names[ k ] ) )
            actual |= std::size_t{ 1 } << k;
    rows[ actual ] = true;

    std::map< std::string, bool_fn, std::less<> > obs;
    for ( const auto& a : agents )
    {
        // dense, sparse or reflexive-leaning relations
        auto density = rng.below( 3 );
        auto rel = rng.table( both.size(), density + 1, 4 );
        obs.emplace( a, from_table( mgr, both, rel ) );
    }
    belief_structure f( mgr, agents, vars, from_table( mgr, vars, rows ), std::move( obs ) );
    return { std::move( f ), std::move( state ) };
}

inline event random_event( random_source& rng, const belief_structure& f, const bounds& b )
{
    auto v = f.names();
    auto added = detail::take( detail::event_pool, rng.below( b.added + 1 ) );
    std::vector< std::string > outside = v;
    outside.insert( outside.end(), added.begin(), added.end() );

    transformer x;
    x.added = added;
    switch ( rng.below( 4 ) )
    {
    case 0: x.event_law = formula::top(); break;
    case 1:
        x.event_law = formula::conjunction(
            { random_boolean( rng, outside, 2 ), random_formula( rng, v, f.agents(), 1 + rng.below( 2 ), 3 ) } );
        break;
    default: x.event_law = random_boolean( rng, outside, 1 + rng.below( 4 ) ); break;
    }

    auto count = rng.below( std::min( b.modified, v.size() ) + 1 );
    auto order = v;
    for ( std::size_t i = order.size(); i > 1; --i )
        std::swap( order[ i - 1 ], order[ rng.below( i ) ] );
    for ( std::size_t i = 0; i < count; ++i )
        x.changes.push_back( { order[ i ], random_boolean( rng, outside, 1 + rng.below( 4 ) ) } );

    std::vector< std::string > doubled = added;
    for ( const auto& q : added )
        doubled.push_back( primed_name( q ) );
    for ( const auto& a : f.agents() )
        if ( !rng.chance( 1, 4 ) )
            x.observations.emplace( a, dnf_of_table( doubled, rng.table( doubled.size(), 1 + rng.below( 3 ), 4 ) ) );

    return { std::move( x ), rng.subset( added ) };
}

// Random scene and event. Non-executable draws are retried; after the retry
// budget the event law is dropped, which always makes the event executable.
inline scene_instance generate_scene_event( std::uint64_t seed, const bounds& b = {} )
{
    random_source rng( seed );
    auto mgr = std::make_shared< bdd_manager >();
    auto sc = random_scene( rng, *mgr, b );
    for ( int attempt = 0; attempt < 8; ++attempt )
    {
        auto ev = random_event( rng, sc.structure(), b );
        try
        {
            (void)apply_event( sc, ev );
            return { seed, mgr, std::move( sc ), std::move( ev ), true };
        }
        catch ( const not_executable_error& )
        {
            if ( attempt == 7 )
            {
                ev.trf.event_law = formula::top();
                return { seed, mgr, std::move( sc ), std::move( ev ), false };
            }
        }
    }
    throw std::logic_error( "unreachable" );
}

struct model_instance
{
    std::uint64_t seed;
    pointed_model model;
    pointed_action action;
};

inline pointed_model random_model( random_source& rng, const bounds& b )
{
    auto names = detail::take( detail::prop_pool, 1 + rng.below( b.vocabulary ) );
    auto agents = detail::take( detail::agent_pool, 1 + rng.below( b.agents ) );
    kripke_model m( { names.begin(), names.end() }, agents );
    auto n = 1 + rng.below( b.worlds );
    for ( std::size_t w = 0; w < n; ++w )
    {
        // duplicated valuations exercise the distinguishing propositions
        auto val = w > 0 && rng.chance( 1, 4 ) ? m.valuation_of( rng.below( w ) ) : rng.subset( names );
        m.add_world( "w" + std::to_string( w ), std::move( val ) );
    }
    for ( const auto& a : agents )
    {
        auto density = 1 + rng.below( 3 );
        for ( std::size_t w = 0; w < n; ++w )
            for ( std::size_t v = 0; v < n; ++v )
                if ( rng.chance( density, 4 ) )
                    m.add_edge( a, w, v );
    }
    auto point = rng.below( n );
    return { std::move( m ), point };
}

inline pointed_action random_action( random_source& rng, const kripke_model& m, const bounds& b )
{
    std::vector< std::string > v( m.vocabulary().begin(), m.vocabulary().end() );
    action_model act( m.agents() );
    auto n = 1 + rng.below( b.events );
    for ( std::size_t e = 0; e < n; ++e )
    {
        formula pre;
        switch ( rng.below( 4 ) )
        {
        case 0: pre = formula::top(); break;
        case 1: pre = random_formula( rng, v, m.agents(), 1, 2 ); break;
        default: pre = random_boolean( rng, v, 1 + rng.below( 3 ) ); break;
        }
        std::map< std::string, formula > post;
        auto count = rng.below( std::min( b.modified, v.size() ) + 1 );
        for ( std::size_t i = 0; i < count; ++i )
        {
            const auto& p = v[ rng.below( v.size() ) ];
            post[ p ] = rng.chance( 1, 6 ) ? formula::atom( p ) : random_boolean( rng, v, 1 + rng.below( 3 ) );
        }
        act.add_event( "e" + std::to_string( e ), std::move( pre ), std::move( post ) );
    }
    for ( const auto& a : m.agents() )
    {
        auto density = 1 + rng.below( 3 );
        for ( std::size_t e = 0; e < n; ++e )
            for ( std::size_t f = 0; f < n; ++f )
                if ( rng.chance( density, 4 ) )
                    act.add_edge( a, e, f );
    }
    return { std::move( act ), rng.below( n ) };
}

// Random pointed model and action whose designated event is executable at the
// point (retried, then forced by replacing that precondition with Top).
inline model_instance generate_model_action( std::uint64_t seed, const bounds& b = {} )
{
    random_source rng( seed );
    auto pm = random_model( rng, b );
    for ( int attempt = 0; attempt < 8; ++attempt )
    {
        auto pa = random_action( rng, pm.model, b );
        if ( eval_pointed( pm, pa.model.pre( pa.designated ) ) )
            return { seed, std::move( pm ), std::move( pa ) };
    }
    auto pa = random_action( rng, pm.model, b );
    action_model fixed( pm.model.agents() );
    for ( std::size_t e = 0; e < pa.model.size(); ++e )
        fixed.add_event( pa.model.name( e ), e == pa.designated ? formula::top() : pa.model.pre( e ), pa.model.changes( e ) );
    for ( const auto& a : pm.model.agents() )
        for ( std::size_t e = 0; e < pa.model.size(); ++e )
            for ( auto f : pa.model.successors( a, e ) )
                fixed.add_edge( a, e, f );
    return { seed, std::move( pm ), { std::move( fixed ), pa.designated } };
}

// Formulas used for equivalence checks: boolean leaves with at most two atoms,
// then boxes over the previous layer, its negations and its conjunctions and
// implications with single atoms, up to the given modal depth.
inline std::vector< formula > formula_family( std::span< const std::string > atoms, std::span< const std::string > agents,
                                              std::size_t depth )
{
    std::vector< formula > leaves{ formula::top() };
    for ( std::size_t i = 0; i < atoms.size(); ++i )
    {
        auto a = formula::atom( atoms[ i ] );
        leaves.push_back( a );
        leaves.push_back( formula::negation( a ) );
        for ( std::size_t j = i + 1; j < atoms.size(); ++j )
        {
            auto c = formula::atom( atoms[ j ] );
            leaves.push_back( formula::conjunction( { a, c } ) );
            leaves.push_back( formula::disjunction( { a, c } ) );
            leaves.push_back( formula::equivalence( a, c ) );
            leaves.push_back( formula::conjunction( { a, formula::negation( c ) } ) );
        }
    }

    std::vector< formula > out = leaves;
    std::vector< formula > layer;
    for ( const auto& i : agents )
        for ( const auto& l : leaves )
            layer.push_back( formula::box( i, l ) );
    for ( std::size_t d = 1; d <= depth && !agents.empty(); ++d )
    {
        out.insert( out.end(), layer.begin(), layer.end() );
        if ( d == depth )
            break;
        std::vector< formula > next;
        for ( const auto& i : agents )
            for ( const auto& g : layer )
            {
                next.push_back( formula::box( i, g ) );
                next.push_back( formula::box( i, formula::negation( g ) ) );
                if ( d == 1 )
                    for ( const auto& p : atoms )
                    {
                        auto a = formula::atom( p );
                        next.push_back( formula::box( i, formula::conjunction( { a, g } ) ) );
                        next.push_back( formula::box( i, formula::implication( a, g ) ) );
                    }
            }
        layer = std::move( next );
    }
    return out;
}

} // namespace symdel
