#pragma once

#include "formula.hpp"

#include <cctype>
#include <optional>
#include <string_view>

namespace symdel
{

// Concrete syntax:
//
//   formula := iff
//   iff     := imp ( "<->" imp )*          left associative
//   imp     := or ( "->" imp )?            right associative
//   or      := and ( "|" and )*
//   and     := unary ( "&" unary )*
//   unary   := "~" unary | "[" IDENT "]" unary | atom
//   atom    := "Top" | "Bot" | IDENT | "(" formula ")"
//
// Identifiers may carry circle suffixes ("p@o", "p@o2") and trailing primes.

namespace detail
{

class formula_parser
{
    enum class tok : std::uint8_t
    {
        ident,
        neg,
        conj,
        disj,
        imp,
        iff,
        lbrack,
        rbrack,
        lparen,
        rparen,
        end
    };

    struct token
    {
        tok kind;
        std::string text;
        std::size_t line;
        std::size_t column;
    };

    std::string_view _text;
    std::size_t _pos = 0, _line = 1, _col = 1;
    token _cur;
    const std::set< std::string >* _agents;

public:
    formula_parser( std::string_view text, const std::set< std::string >* agents ) : _text{ text }, _agents{ agents }
    {
        advance();
    }

    formula parse_all()
    {
        auto f = parse_iff();
        if ( _cur.kind != tok::end )
            fail( "unexpected '" + _cur.text + "'" );
        return f;
    }

private:
    [[noreturn]] void fail( const std::string& message ) const { throw parse_error( message, _cur.line, _cur.column ); }

    void bump()
    {
        if ( _text[ _pos ] == '\n' )
        {
            ++_line;
            _col = 1;
        }
        else
            ++_col;
        ++_pos;
    }

    static bool ident_start( char c ) { return std::isalpha( static_cast< unsigned char >( c ) ) || c == '_'; }
    static bool ident_char( char c ) { return std::isalnum( static_cast< unsigned char >( c ) ) || c == '_'; }

    void advance()
    {
        while ( _pos < _text.size() && std::isspace( static_cast< unsigned char >( _text[ _pos ] ) ) )
            bump();
        _cur = token{ tok::end, "end of input", _line, _col };
        if ( _pos >= _text.size() )
            return;

        auto start = _pos;
        auto rest = _text.substr( _pos );
        auto single = [ & ]( tok k ) {
            _cur.kind = k;
            _cur.text = std::string( 1, _text[ _pos ] );
            bump();
        };

        if ( rest.starts_with( "<->" ) )
        {
            _cur.kind = tok::iff;
            _cur.text = "<->";
            bump(), bump(), bump();
            return;
        }
        if ( rest.starts_with( "->" ) )
        {
            _cur.kind = tok::imp;
            _cur.text = "->";
            bump(), bump();
            return;
        }
        switch ( rest.front() )
        {
        case '~': return single( tok::neg );
        case '&': return single( tok::conj );
        case '|': return single( tok::disj );
        case '[': return single( tok::lbrack );
        case ']': return single( tok::rbrack );
        case '(': return single( tok::lparen );
        case ')': return single( tok::rparen );
        default: break;
        }
        if ( !ident_start( rest.front() ) )
        {
            _cur.text = std::string( 1, rest.front() );
            fail( "unexpected character '" + _cur.text + "'" );
        }
        while ( _pos < _text.size() && ident_char( _text[ _pos ] ) )
            bump();
        while ( _text.substr( _pos ).starts_with( "@o" ) )
        {
            bump(), bump();
            while ( _pos < _text.size() && std::isdigit( static_cast< unsigned char >( _text[ _pos ] ) ) )
                bump();
        }
        while ( _pos < _text.size() && _text[ _pos ] == '\'' )
            bump();
        _cur.kind = tok::ident;
        _cur.text = std::string( _text.substr( start, _pos - start ) );
    }

    formula parse_iff()
    {
        auto lhs = parse_imp();
        while ( _cur.kind == tok::iff )
        {
            advance();
            lhs = formula::equivalence( std::move( lhs ), parse_imp() );
        }
        return lhs;
    }

    formula parse_imp()
    {
        auto lhs = parse_or();
        if ( _cur.kind != tok::imp )
            return lhs;
        advance();
        return formula::implication( std::move( lhs ), parse_imp() );
    }

    formula parse_or()
    {
        std::vector< formula > ops{ parse_and() };
        while ( _cur.kind == tok::disj )
        {
            advance();
            ops.push_back( parse_and() );
        }
        return formula::disjunction( std::move( ops ) );
    }

    formula parse_and()
    {
        std::vector< formula > ops{ parse_unary() };
        while ( _cur.kind == tok::conj )
        {
            advance();
            ops.push_back( parse_unary() );
        }
        return formula::conjunction( std::move( ops ) );
    }

    formula parse_unary()
    {
        if ( _cur.kind == tok::neg )
        {
            advance();
            return formula::negation( parse_unary() );
        }
        if ( _cur.kind == tok::lbrack )
        {
            advance();
            if ( _cur.kind != tok::ident )
                fail( "expected agent name" );
            auto agent = _cur.text;
            if ( _agents && !_agents->contains( agent ) )
                throw unknown_symbol_error( "unknown agent '" + agent + "' at " + std::to_string( _cur.line ) + ":"
                                            + std::to_string( _cur.column ) );
            advance();
            if ( _cur.kind != tok::rbrack )
                fail( "expected ']'" );
            advance();
            return formula::box( std::move( agent ), parse_unary() );
        }
        return parse_atom();
    }

    formula parse_atom()
    {
        if ( _cur.kind == tok::lparen )
        {
            advance();
            auto f = parse_iff();
            if ( _cur.kind != tok::rparen )
                fail( "expected ')'" );
            advance();
            return f;
        }
        if ( _cur.kind != tok::ident )
            fail( "expected a formula but found '" + _cur.text + "'" );
        auto text = _cur.text;
        advance();
        if ( text == "Top" )
            return formula::top();
        if ( text == "Bot" )
            return formula::bot();
        return formula::atom( std::move( text ) );
    }
};

// Binding strength used by the printer; higher binds tighter.
inline int precedence( const formula& f )
{
    switch ( f.kind() )
    {
    case formula_kind::equivalence: return 1;
    case formula_kind::implication: return 2;
    case formula_kind::disjunction: return 3;
    case formula_kind::conjunction: return 4;
    default: return 5;
    }
}

inline void print( std::string& out, const formula& f, int required )
{
    bool paren = precedence( f ) < required;
    if ( paren )
        out += '(';
    switch ( f.kind() )
    {
    case formula_kind::top: out += "Top"; break;
    case formula_kind::bot: out += "Bot"; break;
    case formula_kind::atom: out += f.name(); break;
    case formula_kind::negation:
        out += '~';
        print( out, f.operand(), 5 );
        break;
    case formula_kind::box:
        out += "[" + f.name() + "] ";
        print( out, f.operand(), 5 );
        break;
    case formula_kind::conjunction:
    case formula_kind::disjunction: {
        // nested nodes of the same kind keep their parentheses
        auto op = f.kind() == formula_kind::conjunction ? " & " : " | ";
        auto min = precedence( f ) + 1;
        for ( std::size_t i = 0; i < f.operands().size(); ++i )
        {
            if ( i )
                out += op;
            print( out, f.operand( i ), min );
        }
        break;
    }
    case formula_kind::implication:
        print( out, f.operand( 0 ), 3 );
        out += " -> ";
        print( out, f.operand( 1 ), 2 );
        break;
    case formula_kind::equivalence:
        print( out, f.operand( 0 ), 1 );
        out += " <-> ";
        print( out, f.operand( 1 ), 2 );
        break;
    }
    if ( paren )
        out += ')';
}

} // namespace detail

inline formula parse( std::string_view text ) { return detail::formula_parser( text, nullptr ).parse_all(); }

// Like parse, but rejects boxes for agents outside `agents`.
inline formula parse( std::string_view text, const std::set< std::string >& agents )
{
    return detail::formula_parser( text, &agents ).parse_all();
}

inline std::string to_string( const formula& f )
{
    std::string out;
    detail::print( out, f, 0 );
    return out;
}

inline std::string to_string( const valuation& v )
{
    std::string out = "{";
    for ( const auto& p : v )
    {
        if ( out.size() > 1 )
            out += ",";
        out += p;
    }
    return out + "}";
}

} // namespace symdel
