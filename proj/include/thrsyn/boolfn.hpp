#pragma once

#include <thrsyn/common.hpp>

#include <bit>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace thrsyn
{

/// A vector in {0,1}^n with 1-based coordinates; coordinate i is bit i-1 of `bits`.
struct bit_vector
{
  uint32_t n = 0;
  uint64_t bits = 0;

  bit_vector() = default;
  bit_vector( uint32_t arity, uint64_t word ) : n( arity ), bits( word )
  {
    if ( arity == 0 || arity > 64 )
      throw precondition_error( "bit_vector arity must lie in [1, 64]" );
    if ( arity < 64 )
      bits &= ( uint64_t{ 1 } << arity ) - 1;
  }

  /// Parses a string of '0'/'1' characters, coordinate 1 first.
  static bit_vector parse( const std::string& s )
  {
    if ( s.empty() || s.size() > 64 )
      throw precondition_error( "bit string must have 1..64 characters: '" + s + "'" );
    uint64_t word = 0;
    for ( std::size_t i = 0; i < s.size(); ++i )
    {
      if ( s[i] == '1' )
        word |= uint64_t{ 1 } << i;
      else if ( s[i] != '0' )
        throw precondition_error( "invalid character in bit string '" + s + "'" );
    }
    return bit_vector( static_cast<uint32_t>( s.size() ), word );
  }

  bool operator[]( uint32_t coordinate ) const { return ( bits >> ( coordinate - 1 ) ) & 1u; }

  uint32_t weight() const { return static_cast<uint32_t>( std::popcount( bits ) ); }

  uint64_t full_mask() const { return n == 64 ? ~uint64_t{ 0 } : ( uint64_t{ 1 } << n ) - 1; }

  bit_vector negated() const { return bit_vector( n, ~bits & full_mask() ); }

  std::string str() const
  {
    std::string s( n, '0' );
    for ( uint32_t i = 0; i < n; ++i )
      if ( ( bits >> i ) & 1u )
        s[i] = '1';
    return s;
  }

  friend bool operator==( const bit_vector&, const bit_vector& ) = default;
};

/// A Boolean function on n inputs stored as 2^n packed bits. The entry of input x
/// is at the index obtained by reading x as an integer with coordinate 1 as LSB.
class truth_table
{
public:
  static constexpr uint32_t max_arity = 30;

  truth_table() = default;
  explicit truth_table( uint32_t n ) : n_( n )
  {
    if ( n == 0 || n > max_arity )
      throw precondition_error( "truth table arity must lie in [1, " + std::to_string( max_arity ) + "]" );
    words_.assign( std::max<uint64_t>( 1, ( uint64_t{ 1 } << n ) / 64 ), 0 );
  }

  uint32_t arity() const { return n_; }
  uint64_t size() const { return uint64_t{ 1 } << n_; }

  bool get( uint64_t index ) const { return ( words_[index >> 6] >> ( index & 63 ) ) & 1u; }
  void set( uint64_t index, bool value )
  {
    auto mask = uint64_t{ 1 } << ( index & 63 );
    if ( value )
      words_[index >> 6] |= mask;
    else
      words_[index >> 6] &= ~mask;
  }

  bool operator()( const bit_vector& x ) const
  {
    if ( x.n != n_ )
      throw precondition_error( "input arity " + std::to_string( x.n ) + " does not match function arity " + std::to_string( n_ ) );
    return get( x.bits );
  }

  /// f^{-1}(0) in ascending table-index order.
  std::vector<bit_vector> zeros() const
  {
    std::vector<bit_vector> out;
    for ( uint64_t x = 0; x < size(); ++x )
      if ( !get( x ) )
        out.emplace_back( n_, x );
    return out;
  }

  uint64_t count_zeros() const
  {
    uint64_t ones = 0;
    for ( auto w : words_ )
      ones += std::popcount( w );
    return size() - ones;
  }

  const std::vector<uint64_t>& words() const { return words_; }

  friend bool operator==( const truth_table& a, const truth_table& b )
  {
    if ( a.n_ != b.n_ )
      return false;
    for ( uint64_t x = 0; x < a.size(); ++x )
      if ( a.get( x ) != b.get( x ) )
        return false;
    return true;
  }

  /// Text form: `n=<arity>` then 2^n characters in table-index order.
  std::string to_text() const
  {
    std::string s = "n=" + std::to_string( n_ ) + "\n";
    s.reserve( s.size() + size() + 1 );
    for ( uint64_t x = 0; x < size(); ++x )
      s.push_back( get( x ) ? '1' : '0' );
    s.push_back( '\n' );
    return s;
  }

  static truth_table from_text( std::istream& in )
  {
    std::string header, body;
    if ( !std::getline( in, header ) || header.rfind( "n=", 0 ) != 0 )
      throw precondition_error( "truth table text must start with 'n=<arity>'" );
    uint32_t n = 0;
    try
    {
      n = static_cast<uint32_t>( std::stoul( header.substr( 2 ) ) );
    }
    catch ( const std::exception& )
    {
      throw precondition_error( "bad arity line '" + header + "'" );
    }
    truth_table t( n );
    if ( !std::getline( in, body ) || body.size() != t.size() )
      throw precondition_error( "truth table body must have exactly 2^n characters" );
    for ( uint64_t x = 0; x < t.size(); ++x )
    {
      if ( body[x] != '0' && body[x] != '1' )
        throw precondition_error( "truth table body may only contain '0' and '1'" );
      t.set( x, body[x] == '1' );
    }
    return t;
  }

  static truth_table from_text( const std::string& text )
  {
    std::istringstream in( text );
    return from_text( in );
  }

private:
  uint32_t n_ = 0;
  std::vector<uint64_t> words_;
};

/// THR^b_a: 1 iff the input has at least a ones.
inline truth_table thr( uint32_t b, uint32_t a )
{
  if ( a < 1 || a > b )
    throw precondition_error( "thr(b, a) requires 1 <= a <= b, got b=" + std::to_string( b ) + ", a=" + std::to_string( a ) );
  truth_table t( b );
  for ( uint64_t x = 0; x < t.size(); ++x )
    t.set( x, static_cast<uint32_t>( std::popcount( x ) ) >= a );
  return t;
}

/// MAJ_m for odd m, i.e. thr(m, (m+1)/2).
inline truth_table maj( uint32_t m )
{
  if ( m % 2 == 0 )
    throw precondition_error( "maj(m) requires odd m, got " + std::to_string( m ) );
  return thr( m, ( m + 1 ) / 2 );
}

/// Outcome of a Q_k / R_k membership check.
struct membership_result
{
  bool member = true;
  /// A violating k-tuple from f^{-1}(0) when `member` is false.
  std::vector<bit_vector> witness;
  /// Number of (partial) tuple evaluations performed.
  uint64_t evaluations = 0;

  explicit operator bool() const { return member; }
};

inline constexpr uint64_t default_tuple_budget = 100'000'000;

/// Smallest coordinate where all vectors are 0, if any.
inline std::optional<uint32_t> common_zero( std::span<const bit_vector> vectors )
{
  if ( vectors.empty() )
    return std::nullopt;
  const auto n = vectors.front().n;
  uint64_t ones = 0;
  for ( const auto& v : vectors )
  {
    if ( v.n != n )
      throw precondition_error( "common_zero requires vectors of equal arity" );
    ones |= v.bits;
  }
  const auto zeros = ~ones & vectors.front().full_mask();
  if ( zeros == 0 )
    return std::nullopt;
  return static_cast<uint32_t>( std::countr_zero( zeros ) ) + 1;
}

/// Smallest coordinate where all vectors agree, with the agreed bit.
inline std::optional<std::pair<uint32_t, bool>> common_agreement( std::span<const bit_vector> vectors )
{
  if ( vectors.empty() )
    return std::nullopt;
  const auto n = vectors.front().n;
  uint64_t ones = 0, all = vectors.front().full_mask();
  for ( const auto& v : vectors )
  {
    if ( v.n != n )
      throw precondition_error( "common_agreement requires vectors of equal arity" );
    ones |= v.bits;
    all &= v.bits;
  }
  const auto agree = ( ~ones | all ) & vectors.front().full_mask();
  if ( agree == 0 )
    return std::nullopt;
  const auto i = static_cast<uint32_t>( std::countr_zero( agree ) );
  return std::pair{ i + 1, static_cast<bool>( ( all >> i ) & 1u ) };
}

namespace detail
{

/// Zeros of f that have no strict superset (by support) among the zeros of f.
/// Only these matter for Q_k: shrinking a support never removes a common zero.
inline std::vector<bit_vector> maximal_zeros( const truth_table& f )
{
  const auto size = f.size();
  std::vector<uint8_t> above( size, 0 ); // some strict superset of x is a zero of f
  for ( uint64_t x = size; x-- > 0; )
  {
    for ( uint32_t i = 0; i < f.arity() && !above[x]; ++i )
    {
      const auto y = x | ( uint64_t{ 1 } << i );
      if ( y != x && ( !f.get( y ) || above[y] ) )
        above[x] = 1;
    }
  }
  std::vector<bit_vector> out;
  for ( uint64_t x = 0; x < size; ++x )
    if ( !f.get( x ) && !above[x] )
      out.emplace_back( f.arity(), x );
  return out;
}

} // namespace detail

/// Decides f ∈ Q_k: every k-tuple of zeros of f (repetition allowed) has a
/// coordinate where all of them are 0.
///
/// Exhaustive branch-and-bound over multisets of support-maximal zeros; a branch
/// is cut when the remaining slots cannot cover the missing coordinates.
inline membership_result is_in_qk( const truth_table& f, uint32_t k, uint64_t budget = default_tuple_budget )
{
  if ( k < 2 )
    throw precondition_error( "is_in_qk requires k >= 2" );
  membership_result result;
  const auto zs = detail::maximal_zeros( f );
  if ( zs.empty() )
    return result;

  const auto full = zs.front().full_mask();
  const auto n = f.arity();
  uint32_t max_weight = 0;
  for ( const auto& z : zs )
    max_weight = std::max( max_weight, z.weight() );

  std::vector<std::size_t> pick( k );
  bool found = false;
  auto rec = [&]( auto&& self, uint32_t depth, std::size_t from, uint64_t covered ) -> void {
    if ( found )
      return;
    if ( ++result.evaluations > budget )
      throw budget_error( "is_in_qk: tuple budget of " + std::to_string( budget ) + " evaluations exceeded" );
    if ( covered == full )
    {
      found = true;
      for ( uint32_t d = 0; d < depth; ++d )
        result.witness.push_back( zs[pick[d]] );
      // Pad with repeats of the last vector to a full k-tuple.
      while ( result.witness.size() < k )
        result.witness.push_back( result.witness.back() );
      return;
    }
    if ( depth == k )
      return;
    if ( static_cast<uint64_t>( std::popcount( covered ) ) + uint64_t{ k - depth } * max_weight < n )
      return;
    for ( std::size_t i = from; i < zs.size() && !found; ++i )
    {
      pick[depth] = i;
      self( self, depth + 1, i, covered | zs[i].bits );
    }
  };
  rec( rec, 0, 0, 0 );
  result.member = !found;
  return result;
}

/// Decides f ∈ R_k: every k-tuple of zeros of f has a coordinate where all agree.
inline membership_result is_in_rk( const truth_table& f, uint32_t k, uint64_t budget = default_tuple_budget )
{
  if ( k < 2 )
    throw precondition_error( "is_in_rk requires k >= 2" );
  membership_result result;
  const auto zs = f.zeros();
  if ( zs.empty() )
    return result;
  const auto full = zs.front().full_mask();

  std::vector<std::size_t> pick( k );
  bool found = false;
  // `ones`: coordinates where some vector has a 1; `all`: where every vector has a 1.
  auto rec = [&]( auto&& self, uint32_t depth, std::size_t from, uint64_t ones, uint64_t all ) -> void {
    if ( found )
      return;
    if ( ++result.evaluations > budget )
      throw budget_error( "is_in_rk: tuple budget of " + std::to_string( budget ) + " evaluations exceeded" );
    if ( depth > 0 && ones == full && all == 0 )
    {
      found = true;
      for ( uint32_t d = 0; d < depth; ++d )
        result.witness.push_back( zs[pick[d]] );
      while ( result.witness.size() < k )
        result.witness.push_back( result.witness.back() );
      return;
    }
    if ( depth == k )
      return;
    for ( std::size_t i = from; i < zs.size() && !found; ++i )
    {
      pick[depth] = i;
      self( self, depth + 1, i, ones | zs[i].bits, depth == 0 ? zs[i].bits : ( all & zs[i].bits ) );
    }
  };
  rec( rec, 0, 0, 0, full );
  result.member = !found;
  return result;
}

/// f(¬x) = ¬f(x) for every x.
inline bool is_self_dual( const truth_table& f )
{
  const auto mask = f.size() - 1;
  for ( uint64_t x = 0; x < f.size(); ++x )
    if ( f.get( x ) == f.get( ~x & mask ) )
      return false;
  return true;
}

/// x <= y pointwise implies f(x) <= f(y). Checking single-bit raises suffices.
inline bool is_monotone( const truth_table& f )
{
  for ( uint64_t x = 0; x < f.size(); ++x )
  {
    if ( !f.get( x ) )
      continue;
    for ( uint32_t i = 0; i < f.arity(); ++i )
      if ( !f.get( x | ( uint64_t{ 1 } << i ) ) )
        return false;
  }
  return true;
}

/// Parses the compact function grammar `thr:B:A` or `maj:M`.
inline truth_table parse_function( const std::string& spec )
{
  auto fail = [&]() -> truth_table { throw precondition_error( "bad function specifier '" + spec + "' (expected thr:B:A or maj:M)" ); };
  std::vector<std::string> parts;
  std::stringstream ss( spec );
  for ( std::string part; std::getline( ss, part, ':' ); )
    parts.push_back( part );
  try
  {
    if ( parts.size() == 3 && parts[0] == "thr" )
      return thr( static_cast<uint32_t>( std::stoul( parts[1] ) ), static_cast<uint32_t>( std::stoul( parts[2] ) ) );
    if ( parts.size() == 2 && parts[0] == "maj" )
      return maj( static_cast<uint32_t>( std::stoul( parts[1] ) ) );
  }
  catch ( const std::logic_error& )
  {
    return fail();
  }
  return fail();
}

} // namespace thrsyn
