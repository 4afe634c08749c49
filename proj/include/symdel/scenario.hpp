#pragma once

#include "bridge.hpp"

#include <json.hpp>

#include <fstream>
#include <memory>
#include <regex>
#include <sstream>
#include <variant>

namespace symdel
{

// Problems with a scenario file or its execution; `line` is 1-based, 0 when
// the problem has no single source line.
struct scenario_error : error
{
    scenario_error( std::size_t line, const std::string& message )
            : error( line ? "line " + std::to_string( line ) + ": " + message : message ), line{ line }
    {
    }

    std::size_t line;
};

struct event_step
{
    std::string name;
    std::size_t line = 0;
    event ev;
};

struct action_step
{
    std::string name;
    std::size_t line = 0;
    action_model model;
    std::size_t designated = 0;
};

using scenario_step = std::variant< event_step, action_step >;

struct query
{
    std::size_t after = 0;
    formula phi;
    std::optional< bool > expect;
    std::size_t line = 0;
};

struct scenario
{
    std::vector< std::string > agents;
    std::vector< std::string > vars;
    formula law = formula::top();
    std::map< std::string, formula > obs;
    valuation state;
    std::size_t state_line = 0;
    std::vector< scenario_step > steps;
    std::vector< query > queries;
};

inline const std::string& step_name( const scenario_step& s )
{
    return std::visit( []( const auto& x ) -> const std::string& { return x.name; }, s );
}

inline std::size_t step_line( const scenario_step& s )
{
    return std::visit( []( const auto& x ) { return x.line; }, s );
}

namespace detail
{

inline std::string trim( std::string_view s )
{
    auto b = s.find_first_not_of( " \t\r" );
    if ( b == std::string_view::npos )
        return {};
    auto e = s.find_last_not_of( " \t\r" );
    return std::string( s.substr( b, e - b + 1 ) );
}

inline std::vector< std::string > words( std::string_view s )
{
    std::istringstream in{ std::string( s ) };
    std::vector< std::string > out;
    for ( std::string w; in >> w; )
        out.push_back( w );
    return out;
}

// Proposition lists accept "p q", "p, q" and "{p,q}".
inline std::vector< std::string > prop_list( std::string_view s )
{
    std::string cleaned( s );
    for ( auto& c : cleaned )
        if ( c == ',' || c == '{' || c == '}' )
            c = ' ';
    return words( cleaned );
}

inline bool is_plain_name( const std::string& s )
{
    static const std::regex pattern( "[A-Za-z_][A-Za-z0-9_]*" );
    return std::regex_match( s, pattern ) && s != "Top" && s != "Bot";
}

class scenario_parser
{
    scenario _out;
    std::set< std::string > _agent_set;
    std::set< std::string > _vocab;                  // visible vocabulary after the steps so far
    std::vector< std::set< std::string > > _history; // visible vocabulary after each step
    std::size_t _line = 0;
    bool _steps_started = false;
    bool _law_seen = false;
    bool _state_seen = false;

    [[noreturn]] void fail( const std::string& message ) const { throw scenario_error( _line, message ); }

    formula parse_formula( const std::string& text, std::size_t column )
    {
        if ( text.empty() )
            fail( "missing formula" );
        try
        {
            return parse( text, _agent_set );
        }
        catch ( const parse_error& e )
        {
            std::string message = e.what();
            message = message.substr( 0, message.rfind( " at " ) );
            throw scenario_error( _line, message + " (column " + std::to_string( column + e.column - 1 ) + ")" );
        }
        catch ( const unknown_symbol_error& e )
        {
            fail( e.what() );
        }
    }

    void require_atoms( const formula& f, const std::set< std::string >& allowed, const std::string& what )
    {
        for ( const auto& a : vocabulary( f ) )
            if ( !allowed.contains( a ) )
                fail( what + " mentions unknown proposition '" + a + "'" );
    }

    void require_boolean( const formula& f, const std::string& what )
    {
        if ( !is_boolean( f ) )
            fail( what + " must not contain a box" );
    }

    static std::set< std::string > with_primes( const std::set< std::string >& props )
    {
        auto out = props;
        for ( const auto& p : props )
            out.insert( primed_name( p ) );
        return out;
    }

    // Splits "head: rest" at the first colon.
    std::pair< std::string, std::string > labeled( const std::string& rest )
    {
        auto colon = rest.find( ':' );
        if ( colon == std::string::npos )
            fail( "expected ':'" );
        return { trim( rest.substr( 0, colon ) ), trim( rest.substr( colon + 1 ) ) };
    }

    std::size_t formula_column( const std::string& raw, const std::string& text ) const
    {
        auto at = raw.rfind( text );
        return at == std::string::npos ? 1 : at + 1;
    }

    void header( const std::string& key, const std::string& rest, const std::string& raw )
    {
        if ( _steps_started )
            fail( key + " must come before the first EVENT or ACTION" );
        if ( key == "AGENTS" )
        {
            if ( !_out.agents.empty() )
                fail( "AGENTS declared twice" );
            for ( const auto& a : prop_list( rest ) )
            {
                if ( !is_plain_name( a ) )
                    fail( "invalid agent name '" + a + "'" );
                if ( !_agent_set.insert( a ).second )
                    fail( "agent '" + a + "' declared twice" );
                _out.agents.push_back( a );
            }
        }
        else if ( key == "VARS" )
        {
            for ( const auto& p : prop_list( rest ) )
            {
                if ( !is_plain_name( p ) )
                    fail( "invalid proposition name '" + p + "'" );
                if ( !_vocab.insert( p ).second )
                    fail( "proposition '" + p + "' declared twice" );
                _out.vars.push_back( p );
            }
        }
        else if ( key == "LAW" )
        {
            if ( _law_seen )
                fail( "LAW declared twice" );
            _law_seen = true;
            auto f = parse_formula( rest, formula_column( raw, rest ) );
            require_boolean( f, "the law" );
            require_atoms( f, _vocab, "the law" );
            _out.law = f;
        }
        else if ( key == "OBS" )
        {
            auto [ agent, text ] = labeled( rest );
            if ( !_agent_set.contains( agent ) )
                fail( "unknown agent '" + agent + "'" );
            auto f = parse_formula( text, formula_column( raw, text ) );
            require_boolean( f, "an observation" );
            require_atoms( f, with_primes( _vocab ), "the observation of " + agent );
            if ( !_out.obs.emplace( agent, f ).second )
                fail( "observation of " + agent + " declared twice" );
        }
        else if ( key == "STATE" )
        {
            if ( _state_seen )
                fail( "STATE declared twice" );
            _state_seen = true;
            _out.state_line = _line;
            for ( const auto& p : prop_list( rest ) )
            {
                if ( !_vocab.contains( p ) )
                    fail( "state mentions unknown proposition '" + p + "'" );
                _out.state.insert( p );
            }
        }
    }

    // Fields of the EVENT block being read.
    struct event_draft
    {
        std::set< std::string > added;
        bool pre = false, assign = false;
    };

    struct action_draft
    {
        std::map< std::string, std::size_t, std::less<> > ids;
        std::set< std::size_t > pre;
        std::set< std::string > rel;
        std::optional< std::size_t > designated;
        std::vector< formula > pres;
        std::vector< std::map< std::string, formula > > posts;
        std::vector< std::vector< std::pair< std::size_t, std::size_t > > > edges; // per agent
        bool events_seen = false;
    };

    std::optional< event_draft > _event;
    std::optional< action_draft > _action;

    void event_field( const std::string& key, const std::string& rest, const std::string& raw )
    {
        auto& step = std::get< event_step >( _out.steps.back() );
        auto& x = step.ev.trf;
        auto& d = *_event;
        auto visible = _vocab;
        visible.insert( d.added.begin(), d.added.end() );

        if ( key == "ADDVARS" )
        {
            if ( !x.changes.empty() || d.pre || !x.observations.empty() || d.assign )
                fail( "ADDVARS must be the first field of an event" );
            for ( const auto& p : prop_list( rest ) )
            {
                if ( !is_plain_name( p ) )
                    fail( "invalid proposition name '" + p + "'" );
                if ( _vocab.contains( p ) || d.added.contains( p ) )
                    fail( "event proposition '" + p + "' is already in use" );
                d.added.insert( p );
                x.added.push_back( p );
            }
        }
        else if ( key == "PRE" )
        {
            if ( d.pre )
                fail( "PRE declared twice" );
            d.pre = true;
            auto f = parse_formula( rest, formula_column( raw, rest ) );
            require_atoms( f, visible, "the precondition" );
            x.event_law = f;
        }
        else if ( key == "CHANGE" )
        {
            auto at = rest.find( ":=" );
            if ( at == std::string::npos )
                fail( "expected 'p := formula'" );
            auto p = trim( rest.substr( 0, at ) );
            auto text = trim( rest.substr( at + 2 ) );
            if ( !_vocab.contains( p ) )
                fail( "CHANGE of unknown proposition '" + p + "'" );
            if ( x.change_law( p ) )
                fail( "two changes for '" + p + "'" );
            auto f = parse_formula( text, formula_column( raw, text ) );
            require_boolean( f, "a change law" );
            require_atoms( f, visible, "the change law of " + p );
            x.changes.push_back( { p, f } );
        }
        else if ( key == "OBS+" )
        {
            auto [ agent, text ] = labeled( rest );
            if ( !_agent_set.contains( agent ) )
                fail( "unknown agent '" + agent + "'" );
            auto f = parse_formula( text, formula_column( raw, text ) );
            require_boolean( f, "an event observation" );
            require_atoms( f, with_primes( d.added ), "the event observation of " + agent );
            if ( !x.observations.emplace( agent, f ).second )
                fail( "event observation of " + agent + " declared twice" );
        }
        else if ( key == "ASSIGN" )
        {
            if ( d.assign )
                fail( "ASSIGN declared twice" );
            d.assign = true;
            for ( const auto& p : prop_list( rest ) )
            {
                if ( !d.added.contains( p ) )
                    fail( "ASSIGN mentions '" + p + "', which is not an event proposition" );
                step.ev.actual.insert( p );
            }
        }
        else
            fail( "unexpected " + key + " inside an EVENT block" );
    }

    std::size_t event_id( const action_draft& d, const std::string& name )
    {
        auto it = d.ids.find( name );
        if ( it == d.ids.end() )
            fail( "unknown action event '" + name + "'" );
        return it->second;
    }

    void action_field( const std::string& key, const std::string& rest, const std::string& raw )
    {
        auto& d = *_action;
        if ( key != "EVENTS" && !d.events_seen )
            fail( "EVENTS must be the first field of an action" );
        if ( key == "EVENTS" )
        {
            if ( d.events_seen )
                fail( "EVENTS declared twice" );
            d.events_seen = true;
            for ( const auto& e : words( rest ) )
            {
                if ( e.find_first_of( ":>" ) != std::string::npos )
                    fail( "action event names must not contain ':' or '>'" );
                if ( !d.ids.emplace( e, d.ids.size() ).second )
                    fail( "action event '" + e + "' declared twice" );
            }
            if ( d.ids.empty() )
                fail( "an action needs at least one event" );
            d.pres.assign( d.ids.size(), formula::top() );
            d.posts.resize( d.ids.size() );
            d.edges.resize( _out.agents.size() );
        }
        else if ( key == "PRE" )
        {
            auto [ name, text ] = labeled( rest );
            auto e = event_id( d, name );
            if ( !d.pre.insert( e ).second )
                fail( "precondition of '" + name + "' declared twice" );
            auto f = parse_formula( text, formula_column( raw, text ) );
            require_atoms( f, _vocab, "the precondition of " + name );
            d.pres[ e ] = f;
        }
        else if ( key == "POST" )
        {
            auto [ name, assignment ] = labeled( rest );
            auto e = event_id( d, name );
            auto at = assignment.find( ":=" );
            if ( at == std::string::npos )
                fail( "expected 'event: p := formula'" );
            auto p = trim( assignment.substr( 0, at ) );
            auto text = trim( assignment.substr( at + 2 ) );
            if ( !_vocab.contains( p ) )
                fail( "POST of unknown proposition '" + p + "'" );
            auto f = parse_formula( text, formula_column( raw, text ) );
            require_boolean( f, "a postcondition" );
            require_atoms( f, _vocab, "the postcondition of " + p );
            if ( !d.posts[ e ].emplace( p, f ).second )
                fail( "two postconditions for '" + p + "' in '" + name + "'" );
        }
        else if ( key == "REL" )
        {
            auto [ agent, pairs ] = labeled( rest );
            auto it = std::ranges::find( _out.agents, agent );
            if ( it == _out.agents.end() )
                fail( "unknown agent '" + agent + "'" );
            if ( !d.rel.insert( agent ).second )
                fail( "relation of " + agent + " declared twice" );
            auto& edges = d.edges[ static_cast< std::size_t >( it - _out.agents.begin() ) ];
            for ( const auto& pair : words( pairs ) )
            {
                auto gt = pair.find( '>' );
                if ( gt == std::string::npos )
                    fail( "expected 'from>to', got '" + pair + "'" );
                edges.emplace_back( event_id( d, pair.substr( 0, gt ) ), event_id( d, pair.substr( gt + 1 ) ) );
            }
        }
        else if ( key == "DESIGNATED" )
        {
            if ( d.designated )
                fail( "DESIGNATED declared twice" );
            d.designated = event_id( d, trim( rest ) );
        }
        else
            fail( "unexpected " + key + " inside an ACTION block" );
    }

    void finish_block()
    {
        if ( _event )
        {
            _vocab.insert( _event->added.begin(), _event->added.end() );
            _event.reset();
            _history.push_back( _vocab );
        }
        if ( _action )
        {
            auto& d = *_action;
            auto& step = std::get< action_step >( _out.steps.back() );
            if ( !d.events_seen )
                throw scenario_error( step.line, "action '" + step.name + "' has no EVENTS" );
            if ( !d.designated )
                throw scenario_error( step.line, "action '" + step.name + "' has no DESIGNATED event" );
            std::vector< std::string > names( d.ids.size() );
            for ( const auto& [ name, id ] : d.ids )
                names[ id ] = name;
            for ( std::size_t e = 0; e < names.size(); ++e )
                step.model.add_event( names[ e ], d.pres[ e ], d.posts[ e ] );
            for ( std::size_t i = 0; i < _out.agents.size(); ++i )
            {
                if ( d.rel.contains( _out.agents[ i ] ) )
                    for ( auto [ from, to ] : d.edges[ i ] )
                        step.model.add_edge( _out.agents[ i ], from, to );
                else
                    for ( std::size_t from = 0; from < names.size(); ++from )
                        for ( std::size_t to = 0; to < names.size(); ++to )
                            step.model.add_edge( _out.agents[ i ], from, to );
            }
            step.designated = *d.designated;
            _action.reset();
            _history.push_back( _vocab );
        }
    }

    void check( const std::string& rest, const std::string& raw )
    {
        static const std::regex after( R"(^after\s+(\d+)\s+)" );
        static const std::regex expect( R"(\s+EXPECT\s+(true|false)$)" );
        query q;
        q.line = _line;
        q.after = _out.steps.size();
        std::string text = rest;
        std::smatch m;
        if ( std::regex_search( text, m, after ) )
        {
            q.after = std::stoul( m[ 1 ] );
            text = m.suffix();
        }
        if ( std::regex_search( text, m, expect ) )
        {
            q.expect = m[ 1 ] == "true";
            text = m.prefix();
        }
        text = trim( text );
        q.phi = parse_formula( text, formula_column( raw, text ) );
        _out.queries.push_back( std::move( q ) );
    }

public:
    scenario parse_text( std::string_view text )
    {
        std::istringstream in{ std::string( text ) };
        for ( std::string raw; std::getline( in, raw ); )
        {
            ++_line;
            if ( auto hash = raw.find( '#' ); hash != std::string::npos )
                raw.erase( hash );
            auto line = trim( raw );
            if ( line.empty() )
                continue;
            auto space = line.find_first_of( " \t" );
            auto key = line.substr( 0, space );
            auto rest = space == std::string::npos ? std::string{} : trim( line.substr( space ) );

            if ( key == "EVENT" || key == "ACTION" || key == "CHECK" )
                finish_block();
            if ( key == "EVENT" )
            {
                _steps_started = true;
                _out.steps.emplace_back( event_step{ rest, _line, {} } );
                _event.emplace();
            }
            else if ( key == "ACTION" )
            {
                _steps_started = true;
                _out.steps.emplace_back( action_step{ rest, _line, action_model( _out.agents ), 0 } );
                _action.emplace();
            }
            else if ( key == "CHECK" )
                check( rest, raw );
            else if ( _event )
                event_field( key, rest, raw );
            else if ( _action )
                action_field( key, rest, raw );
            else if ( key == "AGENTS" || key == "VARS" || key == "LAW" || key == "OBS" || key == "STATE" )
                header( key, rest, raw );
            else
                fail( "unknown keyword '" + key + "'" );
        }
        ++_line;
        finish_block();
        _history.insert( _history.begin(), std::set< std::string >( _out.vars.begin(), _out.vars.end() ) );

        for ( const auto& q : _out.queries )
        {
            _line = q.line;
            if ( q.after > _out.steps.size() )
                fail( "CHECK after " + std::to_string( q.after ) + " but the scenario has only "
                      + std::to_string( _out.steps.size() ) + " steps" );
            require_atoms( q.phi, _history[ q.after ], "the query" );
        }
        if ( _out.agents.empty() )
            throw scenario_error( 0, "no AGENTS declared" );
        return std::move( _out );
    }
};

} // namespace detail

inline scenario parse_scenario( std::string_view text ) { return detail::scenario_parser{}.parse_text( text ); }

inline scenario load_scenario( const std::string& path )
{
    std::ifstream in( path );
    if ( !in )
        throw scenario_error( 0, "cannot read '" + path + "'" );
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario( buffer.str() );
}

// Serializes a scenario in the same format, so parse_scenario reads it back.
inline std::string write_scenario( const scenario& sc )
{
    std::string out;
    auto list = []( const auto& items ) {
        std::string s;
        for ( const auto& x : items )
            s += " " + x;
        return s;
    };
    out += "AGENTS" + list( sc.agents ) + "\n";
    out += "VARS" + list( sc.vars ) + "\n";
    out += "LAW " + to_string( sc.law ) + "\n";
    for ( const auto& agent : sc.agents )
        if ( auto it = sc.obs.find( agent ); it != sc.obs.end() )
            out += "OBS " + agent + ": " + to_string( it->second ) + "\n";
    out += "STATE" + list( sc.state ) + "\n";

    for ( const auto& step : sc.steps )
    {
        out += "\n";
        if ( const auto* e = std::get_if< event_step >( &step ) )
        {
            const auto& x = e->ev.trf;
            out += "EVENT " + e->name + "\n";
            if ( !x.added.empty() )
                out += "ADDVARS" + list( x.added ) + "\n";
            out += "PRE " + to_string( x.event_law ) + "\n";
            for ( const auto& c : x.changes )
                out += "CHANGE " + c.prop + " := " + to_string( c.law ) + "\n";
            for ( const auto& agent : sc.agents )
                if ( auto it = x.observations.find( agent ); it != x.observations.end() )
                    out += "OBS+ " + agent + ": " + to_string( it->second ) + "\n";
            out += "ASSIGN" + list( e->ev.actual ) + "\n";
        }
        else
        {
            const auto& a = std::get< action_step >( step );
            const auto& m = a.model;
            out += "ACTION " + a.name + "\nEVENTS";
            for ( std::size_t e = 0; e < m.size(); ++e )
                out += " " + m.name( e );
            out += "\n";
            for ( std::size_t e = 0; e < m.size(); ++e )
            {
                out += "PRE " + m.name( e ) + ": " + to_string( m.pre( e ) ) + "\n";
                for ( const auto& [ p, f ] : m.changes( e ) )
                    out += "POST " + m.name( e ) + ": " + p + " := " + to_string( f ) + "\n";
            }
            for ( const auto& agent : sc.agents )
            {
                out += "REL " + agent + ":";
                for ( std::size_t e = 0; e < m.size(); ++e )
                    for ( auto f : m.successors( agent, e ) )
                        out += " " + m.name( e ) + ">" + m.name( f );
                out += "\n";
            }
            out += "DESIGNATED " + m.name( a.designated ) + "\n";
        }
    }

    if ( !sc.queries.empty() )
        out += "\n";
    for ( const auto& q : sc.queries )
    {
        out += "CHECK after " + std::to_string( q.after ) + " " + to_string( q.phi );
        if ( q.expect )
            out += *q.expect ? " EXPECT true" : " EXPECT false";
        out += "\n";
    }
    return out;
}

// All proposition names a scenario declares, for choosing fresh labels.
inline std::set< std::string > declared_names( const scenario& sc )
{
    std::set< std::string > out( sc.vars.begin(), sc.vars.end() );
    for ( const auto& step : sc.steps )
        if ( const auto* e = std::get_if< event_step >( &step ) )
            out.insert( e->ev.trf.added.begin(), e->ev.trf.added.end() );
    return out;
}

enum class translate_target
{
    action,
    transformer
};

// Replaces every EVENT step by its action model, or every ACTION step by its
// transformer. Throws when the scenario has no step of the source kind.
inline scenario translate( const scenario& sc, translate_target to )
{
    scenario out = sc;
    auto reserved = declared_names( sc );
    bool found = false;
    for ( auto& step : out.steps )
    {
        if ( to == translate_target::action )
        {
            if ( const auto* e = std::get_if< event_step >( &step ) )
            {
                found = true;
                auto a = act( e->ev, sc.agents );
                step = action_step{ e->name, e->line, std::move( a.model ), a.designated };
            }
        }
        else if ( const auto* a = std::get_if< action_step >( &step ) )
        {
            found = true;
            auto lab = trf( a->model, a->designated, reserved );
            reserved.insert( lab.labeling.props.begin(), lab.labeling.props.end() );
            step = event_step{ a->name, a->line, std::move( lab.ev ) };
        }
    }
    if ( !found )
        throw scenario_error( 0, to == translate_target::action ? "the scenario declares no EVENT to translate"
                                                                : "the scenario declares no ACTION to translate" );
    return out;
}

struct run_options
{
    bool minimize = false;
};

struct step_result
{
    std::string name;
    std::optional< scene > raw; // the transform result before minimization
    std::map< std::string, std::string > circled;
    std::vector< std::string > removed;
    scene current;
};

struct query_result
{
    query q;
    bool value = false;

    [[nodiscard]] bool ok() const { return !q.expect || *q.expect == value; }
};

struct run_result
{
    std::shared_ptr< bdd_manager > engine;
    std::vector< step_result > steps; // steps[0] is the initial scene
    std::vector< query_result > queries;

    [[nodiscard]] bool ok() const
    {
        return std::ranges::all_of( queries, []( const query_result& r ) { return r.ok(); } );
    }
};

namespace detail
{

// Removes every determined proposition outside `keep`.
inline scene reduce( const scene& sc, std::set< std::string > keep, std::vector< std::string >& removed )
{
    const auto& f = sc.structure();
    auto& mgr = f.engine();
    std::set< var_id > fixed;
    for ( auto [ v, value ] : determined( f ) )
        fixed.insert( v );
    for ( auto v : f.vocabulary() )
    {
        if ( keep.contains( mgr.name( v ) ) )
            continue;
        if ( fixed.contains( v ) )
            removed.push_back( mgr.name( v ) );
        else
            keep.insert( mgr.name( v ) );
    }
    return minimize( sc, keep );
}

} // namespace detail

inline run_result run( const scenario& sc, run_options options = {} )
{
    run_result out{ std::make_shared< bdd_manager >() };
    auto& mgr = *out.engine;

    auto initial = [ & ] {
        try
        {
            return scene( belief_structure::from_formulas( mgr, sc.agents, sc.vars, sc.law, sc.obs ), sc.state );
        }
        catch ( const scenario_error& )
        {
            throw;
        }
        catch ( const error& e )
        {
            throw scenario_error( sc.state_line, e.what() );
        }
    }();
    out.steps.push_back( { "initial", std::nullopt, {}, {}, initial } );

    std::set< std::string > keep( sc.vars.begin(), sc.vars.end() );
    auto reserved = declared_names( sc );
    for ( const auto& step : sc.steps )
    {
        const auto& current = out.steps.back().current;
        try
        {
            event ev;
            if ( const auto* e = std::get_if< event_step >( &step ) )
                ev = e->ev;
            else
            {
                const auto& a = std::get< action_step >( step );
                auto avoid = reserved;
                for ( const auto& p : current.structure().names() )
                    avoid.insert( p );
                auto lab = trf( a.model, a.designated, avoid );
                reserved.insert( lab.labeling.props.begin(), lab.labeling.props.end() );
                ev = std::move( lab.ev );
            }
            keep.insert( ev.trf.added.begin(), ev.trf.added.end() );

            auto traced = transform_traced( current.structure(), ev.trf );
            auto s = next_state( current.state(), ev, traced.circled );
            if ( !traced.structure.is_state( s ) )
                throw not_executable_error( "step '" + step_name( step ) + "' is not executable at "
                                            + to_string( current.state() ) );
            scene raw( std::move( traced.structure ), std::move( s ) );

            step_result r{ step_name( step ), std::nullopt, std::move( traced.circled ), {}, raw };
            if ( options.minimize )
            {
                r.current = detail::reduce( raw, keep, r.removed );
                r.raw = std::move( raw );
            }
            out.steps.push_back( std::move( r ) );
        }
        catch ( const scenario_error& )
        {
            throw;
        }
        catch ( const error& e )
        {
            throw scenario_error( step_line( step ), e.what() );
        }
    }

    for ( const auto& q : sc.queries )
    {
        try
        {
            out.queries.push_back( { q, scene_eval( out.steps.at( q.after ).current, q.phi ) } );
        }
        catch ( const error& e )
        {
            throw scenario_error( q.line, e.what() );
        }
    }
    return out;
}

namespace detail
{

inline void print_scene( std::string& out, const scene& sc, const std::string& indent )
{
    const auto& f = sc.structure();
    if ( !f.is_state( sc.state() ) )
        throw error( "printed state " + to_string( sc.state() ) + " does not satisfy the law" );
    out += indent + "vars:";
    for ( const auto& p : f.names() )
        out += " " + p;
    out += "\n" + indent + "law: " + to_string( describe( f.law() ) ) + "\n";
    for ( const auto& agent : f.agents() )
        out += indent + "obs " + agent + ": " + to_string( describe( f.observation( agent ) ) ) + "\n";
    out += indent + "state: " + to_string( sc.state() ) + "\n";
}

inline void print_query( std::string& out, const query_result& r )
{
    out += "check after " + std::to_string( r.q.after ) + ": " + to_string( r.q.phi ) + " is "
           + ( r.value ? "true" : "false" );
    if ( r.q.expect )
        out += r.ok() ? " (as expected)" : " (expected " + std::string( *r.q.expect ? "true" : "false" ) + ")";
    out += "\n";
}

} // namespace detail

// Human-readable trace. With `trace`, each step also shows the transform
// result before minimization and the circled copies it introduced.
inline std::string format_run( const run_result& r, bool trace = false )
{
    std::string out;
    for ( std::size_t k = 0; k < r.steps.size(); ++k )
    {
        const auto& step = r.steps[ k ];
        out += k == 0 ? std::string( "initial" ) : "step " + std::to_string( k ) + ": " + step.name;
        out += "\n";
        if ( trace && k > 0 )
        {
            if ( !step.circled.empty() )
            {
                out += "  circled:";
                for ( const auto& [ p, c ] : step.circled )
                    out += " " + p + "->" + c;
                out += "\n";
            }
            if ( step.raw )
            {
                out += "  transform:\n";
                detail::print_scene( out, *step.raw, "    " );
                out += "  removed:";
                for ( const auto& p : step.removed )
                    out += " " + p;
                out += "\n";
            }
        }
        detail::print_scene( out, step.current, "  " );
    }
    std::size_t failed = 0;
    for ( const auto& q : r.queries )
    {
        detail::print_query( out, q );
        failed += !q.ok();
    }
    if ( failed )
        out += std::to_string( failed ) + " of " + std::to_string( r.queries.size() ) + " checks failed\n";
    return out;
}

inline nlohmann::ordered_json scene_json( const scene& sc )
{
    const auto& f = sc.structure();
    nlohmann::ordered_json obs = nlohmann::ordered_json::object();
    for ( const auto& agent : f.agents() )
        obs[ agent ] = to_string( describe( f.observation( agent ) ) );
    return { { "vars", f.names() },
             { "law", to_string( describe( f.law() ) ) },
             { "obs", obs },
             { "state", std::vector< std::string >( sc.state().begin(), sc.state().end() ) } };
}

inline nlohmann::ordered_json run_json( const run_result& r, bool trace = false )
{
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    for ( const auto& step : r.steps )
    {
        nlohmann::ordered_json j{ { "name", step.name }, { "structure", scene_json( step.current ) } };
        if ( trace && step.raw )
        {
            j[ "transform" ] = scene_json( *step.raw );
            j[ "removed" ] = step.removed;
        }
        steps.push_back( std::move( j ) );
    }
    nlohmann::ordered_json queries = nlohmann::ordered_json::array();
    for ( const auto& q : r.queries )
    {
        nlohmann::ordered_json j{ { "after", q.q.after }, { "formula", to_string( q.q.phi ) }, { "value", q.value } };
        j[ "expect" ] = q.q.expect ? nlohmann::ordered_json( *q.q.expect ) : nlohmann::ordered_json();
        j[ "ok" ] = q.ok();
        queries.push_back( std::move( j ) );
    }
    return { { "steps", steps }, { "queries", queries }, { "ok", r.ok() } };
}

} // namespace symdel
