#pragma once

#include <thrsyn/circuit.hpp>

#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace thrsyn
{

/// Comparator network on wires 1..m. A comparator (i, j), i < j, moves the
/// larger bit to wire i and the smaller to wire j, so sorting is descending.
struct comparator_network
{
  uint32_t wires = 0;
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> layers;

  std::size_t num_comparators() const
  {
    std::size_t c = 0;
    for ( const auto& l : layers )
      c += l.size();
    return c;
  }

  /// Applies the network to a 0/1 vector; wire i carries coordinate i.
  bit_vector apply( const bit_vector& x ) const
  {
    auto bits = x.bits;
    for ( const auto& layer : layers )
      for ( auto [i, j] : layer )
      {
        const bool hi = ( bits >> ( i - 1 ) ) & 1u, lo = ( bits >> ( j - 1 ) ) & 1u;
        if ( !hi && lo )
          bits ^= ( uint64_t{ 1 } << ( i - 1 ) ) | ( uint64_t{ 1 } << ( j - 1 ) );
      }
    return bit_vector( x.n, bits );
  }

  friend bool operator==( const comparator_network&, const comparator_network& ) = default;
};

/// Batcher's odd-even mergesort on m wires.
///
/// The network is generated for the next power of two; padding wires are
/// virtual. A virtual wire always sits below every real wire it meets and
/// behaves as a constant 0, so every comparator touching it is a no-op and
/// is dropped.
inline comparator_network batcher_network( uint32_t m )
{
  if ( m < 1 )
    throw precondition_error( "batcher_network requires m >= 1" );
  uint32_t size = 1;
  while ( size < m )
    size *= 2;

  comparator_network net;
  net.wires = m;
  for ( uint32_t p = 1; p < size; p *= 2 )
  {
    for ( uint32_t k = p; k >= 1; k /= 2 )
    {
      std::vector<std::pair<uint32_t, uint32_t>> layer;
      for ( uint32_t j = k % p; j + k < size; j += 2 * k )
        for ( uint32_t i = 0; i < k && i + j + k < size; ++i )
          if ( ( i + j ) / ( 2 * p ) == ( i + j + k ) / ( 2 * p ) && i + j + k < m )
            layer.emplace_back( i + j + 1, i + j + k + 1 );
      if ( !layer.empty() )
        net.layers.push_back( std::move( layer ) );
    }
  }
  return net;
}

/// Monotone circuit for the bit on wire `select` after the network has run.
/// Each comparator turns into an OR on its upper and an AND on its lower wire.
inline circuit network_to_monotone_circuit( const comparator_network& net, uint32_t select )
{
  if ( select < 1 || select > net.wires )
    throw precondition_error( "selected wire " + std::to_string( select ) + " outside [1, " + std::to_string( net.wires ) + "]" );
  circuit c( net.wires );
  std::vector<uint32_t> wire( net.wires + 1 );
  for ( uint32_t i = 1; i <= net.wires; ++i )
    wire[i] = c.add_var( i );
  for ( const auto& layer : net.layers )
    for ( auto [i, j] : layer )
    {
      const auto hi = c.add_or( wire[i], wire[j] );
      const auto lo = c.add_and( wire[i], wire[j] );
      wire[i] = hi;
      wire[j] = lo;
    }
  c.set_output( wire[select] );
  return prune( c );
}

/// Median-wire circuit of the Batcher network, computing MAJ_m for odd m.
inline circuit batcher_majority( uint32_t m )
{
  if ( m % 2 == 0 )
    throw precondition_error( "batcher_majority requires odd m" );
  return network_to_monotone_circuit( batcher_network( m ), ( m + 1 ) / 2 );
}

inline constexpr uint64_t default_formula_budget = 10'000'000;

/// Tree-shaped monotone formula for THR^b_a by splitting the inputs in halves:
/// THR_a(L ∪ R) = OR_j ( THR_j(L) AND THR_{a-j}(R) ). Terms with j = 0 or
/// j = a collapse to the single side, and j ranges only over values for which
/// both thresholds are satisfiable, so no constants are ever needed.
inline circuit dnc_threshold_formula( uint32_t b, uint32_t a, uint64_t size_budget = default_formula_budget )
{
  if ( a < 1 || a > b )
    throw precondition_error( "dnc_threshold_formula requires 1 <= a <= b" );
  if ( b > 64 )
    throw precondition_error( "dnc_threshold_formula supports at most 64 inputs" );

  // Gate count of the formula for threshold t over `width` consecutive inputs.
  std::unordered_map<uint64_t, uint64_t> memo;
  auto count = [&]( auto&& self, uint32_t width, uint32_t t ) -> uint64_t {
    if ( width == 1 )
      return 1;
    const auto key = ( uint64_t{ width } << 32 ) | t;
    if ( auto it = memo.find( key ); it != memo.end() )
      return it->second;
    const auto left = ( width + 1 ) / 2, right = width / 2;
    const auto lo = t > right ? t - right : 0u, hi = std::min( t, left );
    uint64_t total = 0;
    for ( auto j = lo; j <= hi; ++j )
    {
      uint64_t term;
      if ( j == 0 )
        term = self( self, right, t );
      else if ( j == t )
        term = self( self, left, t );
      else
        term = 1 + self( self, left, j ) + self( self, right, t - j );
      total = std::min<uint64_t>( total + term, uint64_t{ 1 } << 62 );
    }
    total += hi - lo; // OR gates joining the terms
    return memo[key] = total;
  };
  const auto projected = count( count, b, a );
  if ( projected > size_budget )
    throw budget_error( "dnc_threshold_formula(" + std::to_string( b ) + ", " + std::to_string( a ) + ") needs " +
                        std::to_string( projected ) + " gates, budget is " + std::to_string( size_budget ) );

  circuit c( b );
  auto build = [&]( auto&& self, uint32_t first, uint32_t width, uint32_t t ) -> uint32_t {
    if ( width == 1 )
      return c.add_var( first );
    const auto left = ( width + 1 ) / 2, right = width / 2;
    const auto lo = t > right ? t - right : 0u, hi = std::min( t, left );
    std::optional<uint32_t> acc;
    for ( auto j = lo; j <= hi; ++j )
    {
      uint32_t term;
      if ( j == 0 )
        term = self( self, first + left, right, t );
      else if ( j == t )
        term = self( self, first, left, t );
      else
      {
        const auto l = self( self, first, left, j );
        const auto r = self( self, first + left, right, t - j );
        term = c.add_and( l, r );
      }
      acc = acc ? c.add_or( *acc, term ) : term;
    }
    return *acc;
  };
  c.set_output( build( build, 1, b, a ) );
  return c;
}

/// Text form: `m=<wires>` then one line per layer of `i:j` pairs.
inline std::string network_to_text( const comparator_network& net )
{
  std::ostringstream os;
  os << "m=" << net.wires << '\n';
  for ( const auto& layer : net.layers )
  {
    for ( std::size_t c = 0; c < layer.size(); ++c )
      os << ( c ? " " : "" ) << layer[c].first << ':' << layer[c].second;
    os << '\n';
  }
  return os.str();
}

inline comparator_network network_from_text( const std::string& text )
{
  std::istringstream in( text );
  std::string line;
  if ( !std::getline( in, line ) || line.rfind( "m=", 0 ) != 0 )
    throw precondition_error( "network text must start with 'm=<wires>'" );
  comparator_network net;
  net.wires = static_cast<uint32_t>( std::stoul( line.substr( 2 ) ) );
  while ( std::getline( in, line ) )
  {
    if ( line.empty() )
      continue;
    std::istringstream ls( line );
    std::vector<std::pair<uint32_t, uint32_t>> layer;
    std::vector<uint8_t> used( net.wires + 1, 0 );
    for ( std::string tok; ls >> tok; )
    {
      const auto colon = tok.find( ':' );
      if ( colon == std::string::npos )
        throw precondition_error( "bad comparator '" + tok + "'" );
      const auto i = static_cast<uint32_t>( std::stoul( tok.substr( 0, colon ) ) );
      const auto j = static_cast<uint32_t>( std::stoul( tok.substr( colon + 1 ) ) );
      if ( i < 1 || i >= j || j > net.wires )
        throw precondition_error( "comparator '" + tok + "' must satisfy 1 <= i < j <= m" );
      if ( used[i] || used[j] )
        throw precondition_error( "comparators within a layer must be disjoint" );
      used[i] = used[j] = 1;
      layer.emplace_back( i, j );
    }
    net.layers.push_back( std::move( layer ) );
  }
  return net;
}

} // namespace thrsyn
