#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace symdel
{

struct error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

// Syntax errors carry a 1-based position inside the parsed text.
struct parse_error : error
{
    parse_error( const std::string& message, std::size_t line, std::size_t column )
            : error( message + " at " + std::to_string( line ) + ":" + std::to_string( column ) ),
              line{ line }, column{ column }
    {
    }

    std::size_t line;
    std::size_t column;
};

// An atom or agent that is not part of the declared vocabulary / agent set.
struct unknown_symbol_error : error
{
    using error::error;
};

// The designated state or world does not survive an update.
struct not_executable_error : error
{
    using error::error;
};

struct point_eliminated_error : error
{
    using error::error;
};

struct not_determined_error : error
{
    explicit not_determined_error( std::string var )
            : error( "variable '" + var + "' is not determined by the state law" ), variable{ std::move( var ) }
    {
    }

    std::string variable;
};

} // namespace symdel
