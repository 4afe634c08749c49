#pragma once

#include "errors.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace symdel
{

// A set of true propositions, identified by name.
using valuation = std::set< std::string >;

enum class formula_kind : std::uint8_t
{
    top,
    bot,
    atom,
    negation,
    conjunction,
    disjunction,
    implication,
    equivalence,
    box
};

// Immutable epistemic formula. Conjunctions and disjunctions are n-ary with at
// least two operands; the derived connectives are kept as nodes of their own so
// that printed output stays close to the input.
class formula
{
    struct node
    {
        formula_kind kind;
        std::string name; // atom name or agent of a box
        std::vector< formula > operands;
    };

    std::shared_ptr< const node > _node;

    explicit formula( node n ) : _node{ std::make_shared< const node >( std::move( n ) ) } {}

public:
    formula() : formula( node{ formula_kind::top, {}, {} } ) {}

    static formula top() { return formula( node{ formula_kind::top, {}, {} } ); }
    static formula bot() { return formula( node{ formula_kind::bot, {}, {} } ); }

    static formula atom( std::string name )
    {
        if ( name.empty() )
            throw error( "empty atom name" );
        return formula( node{ formula_kind::atom, std::move( name ), {} } );
    }

    static formula negation( formula f ) { return formula( node{ formula_kind::negation, {}, { std::move( f ) } } ); }

    // Zero operands give Top, a single operand is returned as is.
    static formula conjunction( std::vector< formula > fs )
    {
        if ( fs.empty() )
            return top();
        if ( fs.size() == 1 )
            return std::move( fs.front() );
        return formula( node{ formula_kind::conjunction, {}, std::move( fs ) } );
    }

    static formula disjunction( std::vector< formula > fs )
    {
        if ( fs.empty() )
            return bot();
        if ( fs.size() == 1 )
            return std::move( fs.front() );
        return formula( node{ formula_kind::disjunction, {}, std::move( fs ) } );
    }

    static formula implication( formula a, formula b )
    {
        return formula( node{ formula_kind::implication, {}, { std::move( a ), std::move( b ) } } );
    }

    static formula equivalence( formula a, formula b )
    {
        return formula( node{ formula_kind::equivalence, {}, { std::move( a ), std::move( b ) } } );
    }

    static formula box( std::string agent, formula body )
    {
        if ( agent.empty() )
            throw error( "empty agent name" );
        return formula( node{ formula_kind::box, std::move( agent ), { std::move( body ) } } );
    }

    [[nodiscard]] formula_kind kind() const { return _node->kind; }
    [[nodiscard]] const std::string& name() const { return _node->name; }
    [[nodiscard]] std::span< const formula > operands() const { return _node->operands; }
    [[nodiscard]] const formula& operand( std::size_t i = 0 ) const { return _node->operands.at( i ); }

    friend bool operator==( const formula& a, const formula& b )
    {
        if ( a._node == b._node )
            return true;
        return a.kind() == b.kind() && a.name() == b.name()
               && std::ranges::equal( a.operands(), b.operands() );
    }
};

// Conjunction that drops Top operands and collapses on Bot.
inline formula conjoin( std::vector< formula > fs )
{
    std::vector< formula > kept;
    for ( auto& f : fs )
    {
        if ( f.kind() == formula_kind::bot )
            return formula::bot();
        if ( f.kind() != formula_kind::top )
            kept.push_back( std::move( f ) );
    }
    return formula::conjunction( std::move( kept ) );
}

inline formula disjoin( std::vector< formula > fs )
{
    std::vector< formula > kept;
    for ( auto& f : fs )
    {
        if ( f.kind() == formula_kind::top )
            return formula::top();
        if ( f.kind() != formula_kind::bot )
            kept.push_back( std::move( f ) );
    }
    return formula::disjunction( std::move( kept ) );
}

namespace detail
{

template < typename Fn >
formula rebuild( const formula& f, Fn&& on_atom )
{
    switch ( f.kind() )
    {
    case formula_kind::top:
    case formula_kind::bot: return f;
    case formula_kind::atom: return on_atom( f );
    case formula_kind::negation: return formula::negation( rebuild( f.operand(), on_atom ) );
    case formula_kind::conjunction:
    case formula_kind::disjunction: {
        std::vector< formula > ops;
        for ( const auto& g : f.operands() )
            ops.push_back( rebuild( g, on_atom ) );
        return f.kind() == formula_kind::conjunction ? formula::conjunction( std::move( ops ) )
                                                     : formula::disjunction( std::move( ops ) );
    }
    case formula_kind::implication:
        return formula::implication( rebuild( f.operand( 0 ), on_atom ), rebuild( f.operand( 1 ), on_atom ) );
    case formula_kind::equivalence:
        return formula::equivalence( rebuild( f.operand( 0 ), on_atom ), rebuild( f.operand( 1 ), on_atom ) );
    case formula_kind::box: return formula::box( f.name(), rebuild( f.operand(), on_atom ) );
    }
    return f;
}

inline void collect( const formula& f, std::set< std::string >* atoms, std::set< std::string >* agents )
{
    if ( f.kind() == formula_kind::atom && atoms )
        atoms->insert( f.name() );
    if ( f.kind() == formula_kind::box && agents )
        agents->insert( f.name() );
    for ( const auto& g : f.operands() )
        collect( g, atoms, agents );
}

} // namespace detail

inline std::set< std::string > vocabulary( const formula& f )
{
    std::set< std::string > out;
    detail::collect( f, &out, nullptr );
    return out;
}

inline std::set< std::string > agents_of( const formula& f )
{
    std::set< std::string > out;
    detail::collect( f, nullptr, &out );
    return out;
}

inline std::size_t modal_depth( const formula& f )
{
    std::size_t d = 0;
    for ( const auto& g : f.operands() )
        d = std::max( d, modal_depth( g ) );
    return f.kind() == formula_kind::box ? d + 1 : d;
}

inline bool is_boolean( const formula& f ) { return modal_depth( f ) == 0; }

// Replaces atoms by formulas. With `parallel` all bindings are applied
// simultaneously; otherwise one after the other in key order. Box bodies are
// substituted through.
inline formula substitute( const formula& f, const std::map< std::string, formula >& bindings, bool parallel = true )
{
    if ( parallel )
        return detail::rebuild( f, [ & ]( const formula& a ) {
            auto it = bindings.find( a.name() );
            return it == bindings.end() ? a : it->second;
        } );
    auto out = f;
    for ( const auto& [ p, psi ] : bindings )
        out = detail::rebuild( out, [ & ]( const formula& a ) { return a.name() == p ? psi : a; } );
    return out;
}

inline formula rename_atoms( const formula& f, const std::map< std::string, std::string >& mapping )
{
    return detail::rebuild( f, [ & ]( const formula& a ) {
        auto it = mapping.find( a.name() );
        return it == mapping.end() ? a : formula::atom( it->second );
    } );
}

inline std::string primed_name( const std::string& p ) { return p + "'"; }
inline std::string circled_name( const std::string& p ) { return p + "@o"; }

inline formula prime( const formula& f )
{
    return detail::rebuild( f, []( const formula& a ) { return formula::atom( primed_name( a.name() ) ); } );
}

inline formula circle( const formula& f, const std::set< std::string >& over )
{
    return detail::rebuild( f, [ & ]( const formula& a ) {
        return over.contains( a.name() ) ? formula::atom( circled_name( a.name() ) ) : a;
    } );
}

// Exactly the atoms of `subset` are true among those of `superset`, listed in
// superset order.
inline formula subset_formula( std::span< const std::string > subset, std::span< const std::string > superset )
{
    for ( const auto& a : subset )
        if ( std::ranges::find( superset, a ) == superset.end() )
            throw error( "subset_formula: '" + a + "' is not in the superset" );
    std::vector< formula > lits;
    for ( const auto& b : superset )
    {
        auto at = formula::atom( b );
        lits.push_back( std::ranges::find( subset, b ) != subset.end() ? at : formula::negation( at ) );
    }
    return formula::conjunction( std::move( lits ) );
}

inline formula subset_formula( const valuation& subset, std::span< const std::string > superset )
{
    std::vector< std::string > sub( subset.begin(), subset.end() );
    return subset_formula( std::span< const std::string >( sub ), superset );
}

// Boolean evaluation; atoms outside the valuation are false.
inline bool holds( const formula& f, const valuation& v )
{
    switch ( f.kind() )
    {
    case formula_kind::top: return true;
    case formula_kind::bot: return false;
    case formula_kind::atom: return v.contains( f.name() );
    case formula_kind::negation: return !holds( f.operand(), v );
    case formula_kind::conjunction:
        return std::ranges::all_of( f.operands(), [ & ]( const formula& g ) { return holds( g, v ); } );
    case formula_kind::disjunction:
        return std::ranges::any_of( f.operands(), [ & ]( const formula& g ) { return holds( g, v ); } );
    case formula_kind::implication: return !holds( f.operand( 0 ), v ) || holds( f.operand( 1 ), v );
    case formula_kind::equivalence: return holds( f.operand( 0 ), v ) == holds( f.operand( 1 ), v );
    case formula_kind::box: break;
    }
    throw error( "boolean evaluation of a formula with a box" );
}

} // namespace symdel
