#pragma once

#include "kripke.hpp"
#include "structure.hpp"

#include <bit>

namespace symdel
{

struct structure_model
{
    kripke_model model;
    std::vector< valuation > states; // world index -> state

    [[nodiscard]] std::optional< world_index > world_of( const valuation& s ) const
    {
        for ( world_index w = 0; w < states.size(); ++w )
            if ( states[ w ] == s )
                return w;
        return std::nullopt;
    }
};

// One world per state; w R_i v iff (w, v') satisfies obs_i.
inline structure_model model_of_structure( const belief_structure& f )
{
    auto names = f.names();
    structure_model out{ kripke_model( { names.begin(), names.end() }, f.agents() ), states( f ) };
    for ( const auto& s : out.states )
        out.model.add_world( to_string( s ), s );
    for ( const auto& agent : f.agents() )
    {
        const auto& obs = f.observation( agent );
        for ( world_index w = 0; w < out.states.size(); ++w )
            for ( world_index v = 0; v < out.states.size(); ++v )
                if ( f.holds( obs, out.states[ w ], &out.states[ v ] ) )
                    out.model.add_edge( agent, w, v );
    }
    return out;
}

inline pointed_model model_of_scene( const scene& sc )
{
    auto m = model_of_structure( sc.structure() );
    auto w = m.world_of( sc.state() );
    return { std::move( m.model ), *w };
}

struct model_structure
{
    belief_structure structure;
    std::vector< valuation > labels; // world index -> state
};

// Belief structure over V plus fresh distinguishing propositions. Worlds with
// equal valuations are told apart by a binary label over ceil(log2 |W|) fresh
// propositions; when all valuations differ no fresh proposition is needed.
inline model_structure structure_of_model( bdd_manager& mgr, const kripke_model& m,
                                           const std::set< std::string >& reserved = {} )
{
    std::set< valuation > distinct;
    for ( world_index w = 0; w < m.size(); ++w )
        distinct.insert( m.valuation_of( w ) );

    std::vector< std::string > vocab( m.vocabulary().begin(), m.vocabulary().end() );
    std::vector< std::string > extra;
    if ( distinct.size() < m.size() )
    {
        auto avoid = reserved;
        avoid.insert( vocab.begin(), vocab.end() );
        auto bits = std::bit_width( m.size() - 1 );
        for ( int k = 0; k < bits; ++k )
        {
            auto name = mgr.fresh_name( "d", avoid );
            avoid.insert( name );
            extra.push_back( name );
        }
    }

    std::vector< valuation > labels;
    for ( world_index w = 0; w < m.size(); ++w )
    {
        auto s = m.valuation_of( w );
        for ( std::size_t k = 0; k < extra.size(); ++k )
            if ( ( w >> k ) & 1u )
                s.insert( extra[ k ] );
        labels.push_back( std::move( s ) );
    }

    auto all = vocab;
    all.insert( all.end(), extra.begin(), extra.end() );
    std::vector< var_id > vars;
    for ( const auto& p : all )
        vars.push_back( mgr.declare( p ) );

    auto exact = [ & ]( const valuation& s, bool primed ) {
        auto out = mgr.constant( true );
        for ( auto v : vars )
            out = out & mgr.literal( primed ? mgr.primed( v ) : v, s.contains( mgr.name( v ) ) );
        return out;
    };

    auto law = mgr.constant( false );
    for ( const auto& s : labels )
        law = law | exact( s, false );

    std::map< std::string, bool_fn, std::less<> > obs;
    for ( const auto& agent : m.agents() )
    {
        auto o = mgr.constant( false );
        for ( world_index w = 0; w < m.size(); ++w )
            for ( auto v : m.successors( agent, w ) )
                o = o | ( exact( labels[ w ], false ) & exact( labels[ v ], true ) );
        obs.emplace( agent, o );
    }
    return { belief_structure( mgr, m.agents(), std::move( vars ), law, std::move( obs ) ), std::move( labels ) };
}

inline scene scene_of_model( bdd_manager& mgr, const pointed_model& pm, const std::set< std::string >& reserved = {} )
{
    auto ms = structure_of_model( mgr, pm.model, reserved );
    return { std::move( ms.structure ), ms.labels.at( pm.point ) };
}

} // namespace symdel
