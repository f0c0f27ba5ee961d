#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace thrsyn
{

/// Base class of every error thrown by the library.
class error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A precondition of an operation does not hold (bad arity, malformed input, ...).
class precondition_error : public error
{
public:
  using error::error;
};

/// An exhaustive procedure would exceed its evaluation/size budget.
class budget_error : public error
{
public:
  using error::error;
};

/// Which communication game (and which circuit leaves) an object refers to:
/// Q uses common zeros and plain variables, R uses agreeing bits and literals.
enum class game_kind
{
  q,
  r
};

inline const char* to_string( game_kind kind )
{
  return kind == game_kind::q ? "Q" : "R";
}

inline game_kind parse_game_kind( const std::string& s )
{
  if ( s == "Q" || s == "q" )
    return game_kind::q;
  if ( s == "R" || s == "r" )
    return game_kind::r;
  throw precondition_error( "unknown game kind '" + s + "'" );
}

/// Fixed-size set of small indices backed by 64-bit words.
///
/// Used for subsets of an enumerated arena (zero-sets of a function) and for
/// rejected color pairs in the compilers; hashable so it can key memo tables.
class index_set
{
public:
  index_set() = default;
  explicit index_set( std::size_t universe, bool full = false )
      : universe_( universe ), words_( ( universe + 63 ) / 64, full ? ~uint64_t{ 0 } : 0 )
  {
    if ( full )
      trim();
  }

  std::size_t universe() const { return universe_; }

  bool contains( std::size_t i ) const { return ( words_[i >> 6] >> ( i & 63 ) ) & 1u; }
  void insert( std::size_t i ) { words_[i >> 6] |= uint64_t{ 1 } << ( i & 63 ); }
  void erase( std::size_t i ) { words_[i >> 6] &= ~( uint64_t{ 1 } << ( i & 63 ) ); }

  std::size_t count() const
  {
    std::size_t c = 0;
    for ( auto w : words_ )
      c += std::popcount( w );
    return c;
  }

  bool empty() const
  {
    return std::all_of( words_.begin(), words_.end(), []( uint64_t w ) { return w == 0; } );
  }

  index_set& operator&=( const index_set& other )
  {
    for ( std::size_t i = 0; i < words_.size(); ++i )
      words_[i] &= other.words_[i];
    return *this;
  }

  friend index_set operator&( index_set a, const index_set& b ) { return a &= b; }
  friend bool operator==( const index_set&, const index_set& ) = default;

  /// Calls fn(i) for every member in ascending order.
  template<typename Fn>
  void for_each( Fn&& fn ) const
  {
    for ( std::size_t w = 0; w < words_.size(); ++w )
    {
      auto word = words_[w];
      while ( word )
      {
        fn( w * 64 + std::countr_zero( word ) );
        word &= word - 1;
      }
    }
  }

  std::vector<std::size_t> members() const
  {
    std::vector<std::size_t> out;
    for_each( [&]( std::size_t i ) { out.push_back( i ); } );
    return out;
  }

  const std::vector<uint64_t>& words() const { return words_; }

private:
  void trim()
  {
    if ( universe_ % 64 )
      words_.back() &= ( uint64_t{ 1 } << ( universe_ % 64 ) ) - 1;
  }

  std::size_t universe_ = 0;
  std::vector<uint64_t> words_;
};

inline void hash_combine( std::size_t& seed, std::size_t value )
{
  seed ^= value + 0x9e3779b97f4a7c15ull + ( seed << 6 ) + ( seed >> 2 );
}

struct index_set_hash
{
  std::size_t operator()( const index_set& s ) const
  {
    std::size_t h = s.universe();
    for ( auto w : s.words() )
      hash_combine( h, std::hash<uint64_t>{}( w ) );
    return h;
  }
};

/// Reproducible random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Bounded draws use Lemire's multiply-and-reject method instead of
/// std::uniform_int_distribution (whose algorithm is implementation-defined),
/// so a seed gives the same samples on every platform.
class rng
{
public:
  explicit rng( uint64_t seed ) : engine_( seed ) {}

  uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound).
  uint64_t below( uint64_t bound )
  {
    if ( bound == 0 )
      throw precondition_error( "rng::below with empty range" );
    auto x = engine_();
    auto m = static_cast<unsigned __int128>( x ) * bound;
    auto low = static_cast<uint64_t>( m );
    if ( low < bound )
    {
      uint64_t threshold = ( 0 - bound ) % bound;
      while ( low < threshold )
      {
        x = engine_();
        m = static_cast<unsigned __int128>( x ) * bound;
        low = static_cast<uint64_t>( m );
      }
    }
    return static_cast<uint64_t>( m >> 64 );
  }

private:
  std::mt19937_64 engine_;
};

/// Smallest w with 2^w >= value (0 for value <= 1).
inline uint32_t ceil_log2( uint64_t value )
{
  return value <= 1 ? 0u : static_cast<uint32_t>( std::bit_width( value - 1 ) );
}

} // namespace thrsyn
