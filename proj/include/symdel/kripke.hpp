#pragma once

#include "formula.hpp"
#include "syntax.hpp"

#include <sstream>

namespace symdel
{

using world_index = std::size_t;

namespace detail
{

// Per-agent successor lists over indices 0..n-1.
class relation_table
{
    std::vector< std::string > _agents;
    std::map< std::string, std::vector< std::vector< std::size_t > >, std::less<> > _succ;

public:
    relation_table() = default;
    explicit relation_table( std::vector< std::string > agents ) : _agents{ std::move( agents ) }
    {
        for ( const auto& a : _agents )
            _succ[ a ];
    }

    [[nodiscard]] const std::vector< std::string >& agents() const { return _agents; }

    void grow( std::size_t n )
    {
        for ( auto& [ a, rows ] : _succ )
            rows.resize( n );
    }

    std::vector< std::vector< std::size_t > >& rows( std::string_view agent )
    {
        auto it = _succ.find( agent );
        if ( it == _succ.end() )
            throw unknown_symbol_error( "unknown agent '" + std::string( agent ) + "'" );
        return it->second;
    }

    [[nodiscard]] const std::vector< std::vector< std::size_t > >& rows( std::string_view agent ) const
    {
        auto it = _succ.find( agent );
        if ( it == _succ.end() )
            throw unknown_symbol_error( "unknown agent '" + std::string( agent ) + "'" );
        return it->second;
    }

    void add( std::string_view agent, std::size_t from, std::size_t to )
    {
        auto& r = rows( agent );
        if ( from >= r.size() || to >= r.size() )
            throw error( "edge mentions an unknown element" );
        auto& out = r[ from ];
        if ( auto it = std::ranges::lower_bound( out, to ); it == out.end() || *it != to )
            out.insert( it, to );
    }

    [[nodiscard]] bool has( std::string_view agent, std::size_t from, std::size_t to ) const
    {
        return std::ranges::binary_search( rows( agent ).at( from ), to );
    }
};

} // namespace detail

class kripke_model
{
    std::set< std::string > _vocabulary;
    std::vector< std::string > _names;
    std::vector< valuation > _valuation;
    detail::relation_table _rel;

public:
    kripke_model( std::set< std::string > vocabulary, std::vector< std::string > agents )
            : _vocabulary{ std::move( vocabulary ) }, _rel{ std::move( agents ) }
    {
    }

    world_index add_world( std::string name, valuation val )
    {
        for ( const auto& p : val )
            if ( !_vocabulary.contains( p ) )
                throw unknown_symbol_error( "valuation mentions '" + p + "' outside the vocabulary" );
        _names.push_back( std::move( name ) );
        _valuation.push_back( std::move( val ) );
        _rel.grow( _names.size() );
        return _names.size() - 1;
    }

    void add_edge( std::string_view agent, world_index from, world_index to ) { _rel.add( agent, from, to ); }

    [[nodiscard]] std::size_t size() const { return _names.size(); }
    [[nodiscard]] const std::set< std::string >& vocabulary() const { return _vocabulary; }
    [[nodiscard]] const std::vector< std::string >& agents() const { return _rel.agents(); }
    [[nodiscard]] const std::string& name( world_index w ) const { return _names.at( w ); }
    [[nodiscard]] const valuation& valuation_of( world_index w ) const { return _valuation.at( w ); }

    [[nodiscard]] const std::vector< world_index >& successors( std::string_view agent, world_index w ) const
    {
        return _rel.rows( agent ).at( w );
    }

    [[nodiscard]] bool has_edge( std::string_view agent, world_index from, world_index to ) const
    {
        return _rel.has( agent, from, to );
    }

    [[nodiscard]] std::optional< world_index > find( std::string_view name ) const
    {
        for ( world_index w = 0; w < _names.size(); ++w )
            if ( _names[ w ] == name )
                return w;
        return std::nullopt;
    }
};

struct pointed_model
{
    kripke_model model;
    world_index point;
};

// Events with preconditions (possibly epistemic) and boolean postconditions.
// Propositions without an explicit postcondition keep their value.
class action_model
{
    std::vector< std::string > _names;
    std::vector< formula > _pre;
    std::vector< std::map< std::string, formula > > _post;
    detail::relation_table _rel;

public:
    explicit action_model( std::vector< std::string > agents ) : _rel{ std::move( agents ) } {}

    std::size_t add_event( std::string name, formula pre, std::map< std::string, formula > post = {} )
    {
        for ( const auto& [ p, f ] : post )
            if ( !is_boolean( f ) )
                throw error( "postcondition of '" + p + "' in event '" + name + "' contains a box" );
        _names.push_back( std::move( name ) );
        _pre.push_back( std::move( pre ) );
        _post.push_back( std::move( post ) );
        _rel.grow( _names.size() );
        return _names.size() - 1;
    }

    void add_edge( std::string_view agent, std::size_t from, std::size_t to ) { _rel.add( agent, from, to ); }

    [[nodiscard]] std::size_t size() const { return _names.size(); }
    [[nodiscard]] const std::vector< std::string >& agents() const { return _rel.agents(); }
    [[nodiscard]] const std::string& name( std::size_t e ) const { return _names.at( e ); }
    [[nodiscard]] const formula& pre( std::size_t e ) const { return _pre.at( e ); }
    [[nodiscard]] const std::map< std::string, formula >& changes( std::size_t e ) const { return _post.at( e ); }

    [[nodiscard]] formula post( std::size_t e, const std::string& p ) const
    {
        const auto& m = _post.at( e );
        auto it = m.find( p );
        return it == m.end() ? formula::atom( p ) : it->second;
    }

    [[nodiscard]] const std::vector< std::size_t >& successors( std::string_view agent, std::size_t e ) const
    {
        return _rel.rows( agent ).at( e );
    }

    [[nodiscard]] bool has_edge( std::string_view agent, std::size_t from, std::size_t to ) const
    {
        return _rel.has( agent, from, to );
    }

    [[nodiscard]] std::optional< std::size_t > find( std::string_view name ) const
    {
        for ( std::size_t e = 0; e < _names.size(); ++e )
            if ( _names[ e ] == name )
                return e;
        return std::nullopt;
    }
};

// Truth value of the formula at every world.
inline std::vector< bool > truth_set( const kripke_model& m, const formula& f )
{
    auto n = m.size();
    switch ( f.kind() )
    {
    case formula_kind::top: return std::vector< bool >( n, true );
    case formula_kind::bot: return std::vector< bool >( n, false );
    case formula_kind::atom: {
        if ( !m.vocabulary().contains( f.name() ) )
            throw unknown_symbol_error( "unknown atom '" + f.name() + "'" );
        std::vector< bool > out( n );
        for ( world_index w = 0; w < n; ++w )
            out[ w ] = m.valuation_of( w ).contains( f.name() );
        return out;
    }
    case formula_kind::negation: {
        auto out = truth_set( m, f.operand() );
        out.flip();
        return out;
    }
    case formula_kind::conjunction:
    case formula_kind::disjunction: {
        bool is_and = f.kind() == formula_kind::conjunction;
        std::vector< bool > out( n, is_and );
        for ( const auto& g : f.operands() )
        {
            auto sub = truth_set( m, g );
            for ( world_index w = 0; w < n; ++w )
                out[ w ] = is_and ? out[ w ] && sub[ w ] : out[ w ] || sub[ w ];
        }
        return out;
    }
    case formula_kind::implication:
    case formula_kind::equivalence: {
        auto a = truth_set( m, f.operand( 0 ) );
        auto b = truth_set( m, f.operand( 1 ) );
        std::vector< bool > out( n );
        for ( world_index w = 0; w < n; ++w )
            out[ w ] = f.kind() == formula_kind::implication ? ( !a[ w ] || b[ w ] ) : ( a[ w ] == b[ w ] );
        return out;
    }
    case formula_kind::box: {
        auto body = truth_set( m, f.operand() );
        std::vector< bool > out( n, true );
        for ( world_index w = 0; w < n; ++w )
            for ( auto v : m.successors( f.name(), w ) )
                if ( !body[ v ] )
                {
                    out[ w ] = false;
                    break;
                }
        return out;
    }
    }
    return {};
}

inline bool eval( const kripke_model& m, world_index w, const formula& f )
{
    if ( w >= m.size() )
        throw error( "world index out of range" );
    return truth_set( m, f )[ w ];
}

inline bool eval_pointed( const pointed_model& pm, const formula& f ) { return eval( pm.model, pm.point, f ); }

// Result of a product update together with the (world, event) pair each new
// world comes from.
struct product
{
    kripke_model model;
    std::vector< std::pair< world_index, std::size_t > > origin;

    [[nodiscard]] std::optional< world_index > find( world_index w, std::size_t e ) const
    {
        for ( world_index i = 0; i < origin.size(); ++i )
            if ( origin[ i ] == std::pair{ w, e } )
                return i;
        return std::nullopt;
    }
};

inline product product_update_traced( const kripke_model& m, const action_model& act )
{
    auto same_agents = std::ranges::is_permutation( m.agents(), act.agents() );
    if ( !same_agents )
        throw unknown_symbol_error( "model and action disagree on the agent set" );

    std::vector< std::vector< bool > > pre;
    std::vector< std::map< std::string, std::vector< bool > > > post;
    for ( std::size_t e = 0; e < act.size(); ++e )
    {
        pre.push_back( truth_set( m, act.pre( e ) ) );
        auto& row = post.emplace_back();
        for ( const auto& [ p, f ] : act.changes( e ) )
        {
            if ( !m.vocabulary().contains( p ) )
                throw unknown_symbol_error( "postcondition for '" + p + "' outside the vocabulary" );
            row.emplace( p, truth_set( m, f ) );
        }
    }

    product out{ kripke_model( m.vocabulary(), m.agents() ), {} };
    for ( world_index w = 0; w < m.size(); ++w )
        for ( std::size_t e = 0; e < act.size(); ++e )
        {
            if ( !pre[ e ][ w ] )
                continue;
            valuation val;
            for ( const auto& p : m.vocabulary() )
            {
                auto it = post[ e ].find( p );
                if ( it == post[ e ].end() ? m.valuation_of( w ).contains( p ) : it->second[ w ] )
                    val.insert( p );
            }
            out.model.add_world( "(" + m.name( w ) + "," + act.name( e ) + ")", std::move( val ) );
            out.origin.emplace_back( w, e );
        }

    std::map< std::pair< world_index, std::size_t >, world_index > index;
    for ( world_index i = 0; i < out.origin.size(); ++i )
        index.emplace( out.origin[ i ], i );
    for ( const auto& agent : m.agents() )
    {
        for ( world_index i = 0; i < out.origin.size(); ++i )
        {
            auto [ w, e ] = out.origin[ i ];
            for ( auto v : m.successors( agent, w ) )
                for ( auto f : act.successors( agent, e ) )
                    if ( auto it = index.find( { v, f } ); it != index.end() )
                        out.model.add_edge( agent, i, it->second );
        }
    }
    return out;
}

inline kripke_model product_update( const kripke_model& m, const action_model& act )
{
    return product_update_traced( m, act ).model;
}

// Updates a pointed model with the action (act, event).
inline pointed_model product_update( const pointed_model& pm, const action_model& act, std::size_t event )
{
    auto p = product_update_traced( pm.model, act );
    auto point = p.find( pm.point, event );
    if ( !point )
        throw point_eliminated_error( "the precondition of event '" + act.name( event ) + "' fails at world '"
                                      + pm.model.name( pm.point ) + "'" );
    return { std::move( p.model ), *point };
}

// Debug listing: one line per world, then one line per agent with its edges.
inline std::string to_string( const kripke_model& m )
{
    std::ostringstream out;
    for ( world_index w = 0; w < m.size(); ++w )
        out << "world " << m.name( w ) << " " << to_string( m.valuation_of( w ) ) << "\n";
    for ( const auto& a : m.agents() )
    {
        out << "agent " << a << ":";
        for ( world_index w = 0; w < m.size(); ++w )
            for ( auto v : m.successors( a, w ) )
                out << " " << m.name( w ) << ">" << m.name( v );
        out << "\n";
    }
    return out.str();
}

} // namespace symdel
