#pragma once

#include "conversion.hpp"

#include <bit>

namespace symdel
{

struct pointed_action
{
    action_model model;
    std::size_t designated;
};

namespace detail
{

inline std::vector< valuation > subsets( std::span< const std::string > props )
{
    std::vector< valuation > out;
    for ( std::size_t bits = 0; bits < ( std::size_t{ 1 } << props.size() ); ++bits )
    {
        valuation s;
        for ( std::size_t k = 0; k < props.size(); ++k )
            if ( ( bits >> k ) & 1u )
                s.insert( props[ k ] );
        out.push_back( std::move( s ) );
    }
    return out;
}

// [a/Top][(V+ \ a)/Bot]
inline std::map< std::string, formula > fix_event( std::span< const std::string > added, const valuation& a )
{
    std::map< std::string, formula > out;
    for ( const auto& q : added )
        out.emplace( q, a.contains( q ) ? formula::top() : formula::bot() );
    return out;
}

} // namespace detail

// The action model with one event per subset of V+. Event names print the
// subset, e.g. "{}" and "{q}".
inline pointed_action act( const event& ev, const std::vector< std::string >& agents )
{
    const auto& x = ev.trf;
    for ( const auto& [ agent, o ] : x.observations )
        if ( std::ranges::find( agents, agent ) == agents.end() )
            throw unknown_symbol_error( "event observation for unknown agent '" + agent + "'" );

    auto events = detail::subsets( x.added );
    action_model out( agents );
    for ( const auto& a : events )
    {
        auto fix = detail::fix_event( x.added, a );
        std::map< std::string, formula > post;
        for ( const auto& c : x.changes )
            post.emplace( c.prop, substitute( c.law, fix ) );
        out.add_event( to_string( a ), substitute( x.event_law, fix ), std::move( post ) );
    }
    for ( const auto& agent : agents )
    {
        auto it = x.observations.find( agent );
        for ( std::size_t i = 0; i < events.size(); ++i )
            for ( std::size_t j = 0; j < events.size(); ++j )
            {
                bool related = true;
                if ( it != x.observations.end() )
                {
                    auto both = events[ i ];
                    for ( const auto& q : events[ j ] )
                        both.insert( primed_name( q ) );
                    related = holds( it->second, both );
                }
                if ( related )
                    out.add_edge( agent, i, j );
            }
    }
    auto designated = std::ranges::find( events, ev.actual );
    if ( designated == events.end() )
        throw error( "actual event " + to_string( ev.actual ) + " is not a subset of the event propositions" );
    return { std::move( out ), static_cast< std::size_t >( designated - events.begin() ) };
}

// Injective labels: event k gets the binary digits of k over q1..qn, where n
// is the number of bits needed for the event count.
struct event_labeling
{
    std::vector< std::string > props;
    std::vector< valuation > labels;
};

inline event_labeling label_events( std::size_t count, const std::set< std::string >& reserved )
{
    event_labeling out;
    auto bits = count <= 1 ? 0 : std::bit_width( count - 1 );
    auto avoid = reserved;
    for ( int k = 1; static_cast< int >( out.props.size() ) < bits; ++k )
    {
        auto name = "q" + std::to_string( k );
        if ( avoid.contains( name ) )
            continue;
        out.props.push_back( name );
    }
    for ( std::size_t e = 0; e < count; ++e )
    {
        valuation label;
        for ( std::size_t k = 0; k < out.props.size(); ++k )
            if ( ( e >> k ) & 1u )
                label.insert( out.props[ k ] );
        out.labels.push_back( std::move( label ) );
    }
    return out;
}

struct labeled_event
{
    event ev;
    event_labeling labeling;
};

// The transformer of an action model. Fresh label propositions avoid the atoms
// of the action and everything in `reserved`. A proposition is modified when
// some event gives it a postcondition that differs syntactically from itself.
inline labeled_event trf( const action_model& a, std::size_t designated, const std::set< std::string >& reserved = {} )
{
    if ( designated >= a.size() )
        throw error( "designated event out of range" );

    auto avoid = reserved;
    std::set< std::string > changed;
    for ( std::size_t e = 0; e < a.size(); ++e )
    {
        auto pre_atoms = vocabulary( a.pre( e ) );
        avoid.insert( pre_atoms.begin(), pre_atoms.end() );
        for ( const auto& [ p, f ] : a.changes( e ) )
        {
            avoid.insert( p );
            auto atoms = vocabulary( f );
            avoid.insert( atoms.begin(), atoms.end() );
            if ( !( f.kind() == formula_kind::atom && f.name() == p ) )
                changed.insert( p );
        }
    }

    auto lab = label_events( a.size(), avoid );
    auto is_label = [ & ]( std::size_t e ) { return subset_formula( lab.labels[ e ], lab.props ); };

    transformer x;
    x.added = lab.props;

    std::vector< formula > cases;
    for ( std::size_t e = 0; e < a.size(); ++e )
        cases.push_back( conjoin( { a.pre( e ), is_label( e ) } ) );
    x.event_law = disjoin( std::move( cases ) );

    for ( const auto& p : changed )
    {
        std::vector< formula > by_event;
        for ( std::size_t e = 0; e < a.size(); ++e )
            by_event.push_back( conjoin( { is_label( e ), a.post( e, p ) } ) );
        x.changes.push_back( { p, disjoin( std::move( by_event ) ) } );
    }

    for ( const auto& agent : a.agents() )
    {
        std::vector< formula > edges;
        for ( std::size_t e = 0; e < a.size(); ++e )
            for ( auto f : a.successors( agent, e ) )
                edges.push_back( conjoin( { is_label( e ), prime( is_label( f ) ) } ) );
        x.observations.emplace( agent, disjoin( std::move( edges ) ) );
    }

    return { event{ std::move( x ), lab.labels[ designated ] }, std::move( lab ) };
}

struct morphism_report
{
    bool ok = true;
    std::string violation;
};

// Checks that g (world -> state) relates the model to the structure:
//   C1  g(w) (g(v))' satisfies obs_i  iff  w R_i v
//   C2  g(w) and the valuation of w agree on `shared`
//   C3  the states of the structure are exactly the image of g
inline morphism_report check_morphism( const belief_structure& f, const kripke_model& m, const std::set< std::string >& shared,
                                       const std::vector< valuation >& g )
{
    if ( g.size() != m.size() )
        return { false, "g is not total on the worlds" };

    for ( const auto& agent : m.agents() )
    {
        if ( !f.has_agent( agent ) )
            return { false, "agent " + agent + " is missing from the structure" };
        const auto& obs = f.observation( agent );
        for ( world_index w = 0; w < m.size(); ++w )
            for ( world_index v = 0; v < m.size(); ++v )
                if ( f.holds( obs, g[ w ], &g[ v ] ) != m.has_edge( agent, w, v ) )
                    return { false, "C1 fails for agent " + agent + " between " + m.name( w ) + " and " + m.name( v ) };
    }

    for ( world_index w = 0; w < m.size(); ++w )
        for ( const auto& p : shared )
            if ( g[ w ].contains( p ) != m.valuation_of( w ).contains( p ) )
                return { false, "C2 fails for " + p + " at " + m.name( w ) };

    auto names = f.names();
    std::set< valuation > image( g.begin(), g.end() );
    for ( const auto& s : detail::subsets( names ) )
        if ( f.is_state( s ) != image.contains( s ) )
            return { false, "C3 fails for " + to_string( s ) };
    return {};
}

} // namespace symdel
