#pragma once

#include "boolfun.hpp"
#include "formula.hpp"

namespace symdel
{

using environment = std::map< std::string, var_id >;

// Binds each base variable by name and, with `with_primes`, its primed twin as name'.
inline environment make_environment( const bdd_manager& mgr, std::span< const var_id > vars, bool with_primes = false )
{
    environment env;
    for ( auto v : vars )
    {
        env.emplace( mgr.name( v ), v );
        if ( with_primes )
        {
            auto p = mgr.primed( v );
            env.emplace( mgr.name( p ), p );
        }
    }
    return env;
}

// Compiles a box-free formula. Atoms must be bound in `env`.
inline bool_fn compile( bdd_manager& mgr, const formula& f, const environment& env )
{
    switch ( f.kind() )
    {
    case formula_kind::top: return mgr.constant( true );
    case formula_kind::bot: return mgr.constant( false );
    case formula_kind::atom: {
        auto it = env.find( f.name() );
        if ( it == env.end() )
            throw unknown_symbol_error( "unbound atom '" + f.name() + "'" );
        return mgr.var( it->second );
    }
    case formula_kind::negation: return mgr.negate( compile( mgr, f.operand(), env ) );
    case formula_kind::conjunction:
    case formula_kind::disjunction: {
        std::vector< bool_fn > parts;
        for ( const auto& g : f.operands() )
            parts.push_back( compile( mgr, g, env ) );
        return mgr.combine( f.kind() == formula_kind::conjunction ? bool_op::and_ : bool_op::or_, parts );
    }
    case formula_kind::implication:
        return mgr.apply( bool_op::implies, compile( mgr, f.operand( 0 ), env ), compile( mgr, f.operand( 1 ), env ) );
    case formula_kind::equivalence:
        return mgr.apply( bool_op::iff, compile( mgr, f.operand( 0 ), env ), compile( mgr, f.operand( 1 ), env ) );
    case formula_kind::box: break;
    }
    throw error( "cannot compile a formula containing a box" );
}

namespace detail
{

inline void flatten_into( std::vector< formula >& out, formula f )
{
    if ( f.kind() == formula_kind::conjunction )
        for ( const auto& g : f.operands() )
            out.push_back( g );
    else if ( f.kind() != formula_kind::top )
        out.push_back( std::move( f ) );
}

inline formula describe_rec( bdd_manager& mgr, const bool_fn& f )
{
    if ( f.is_true() )
        return formula::top();
    if ( f.is_false() )
        return formula::bot();

    // Literals entailed by f become unit conjuncts; the remainder is restricted.
    std::vector< formula > units;
    auto rest = f;
    for ( auto v : mgr.support( f ) )
    {
        auto pos = mgr.var( v );
        if ( mgr.implies( rest, pos ) )
        {
            units.push_back( formula::atom( mgr.name( v ) ) );
            rest = mgr.restrict( rest, v, true );
        }
        else if ( mgr.implies( rest, !pos ) )
        {
            units.push_back( formula::negation( formula::atom( mgr.name( v ) ) ) );
            rest = mgr.restrict( rest, v, false );
        }
    }
    if ( !units.empty() )
    {
        flatten_into( units, describe_rec( mgr, rest ) );
        return formula::conjunction( std::move( units ) );
    }

    auto v = formula::atom( mgr.name( mgr.top_var( f ) ) );
    auto lo = mgr.low( f );
    auto hi = mgr.high( f );
    if ( lo.is_true() )
        return formula::implication( v, describe_rec( mgr, hi ) );
    if ( hi.is_true() )
        return formula::disjunction( { v, describe_rec( mgr, lo ) } );
    if ( hi == !lo )
        return formula::equivalence( v, describe_rec( mgr, hi ) );
    std::vector< formula > pos{ v }, neg{ formula::negation( v ) };
    flatten_into( pos, describe_rec( mgr, hi ) );
    flatten_into( neg, describe_rec( mgr, lo ) );
    return formula::disjunction( { formula::conjunction( std::move( pos ) ), formula::conjunction( std::move( neg ) ) } );
}

} // namespace detail

// Readable formula for a boolean function. Deterministic for a fixed variable
// order, but not canonical: compare functions, not their descriptions.
inline formula describe( const bool_fn& f )
{
    return detail::describe_rec( *f.engine(), f );
}

} // namespace symdel
