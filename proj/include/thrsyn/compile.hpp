#pragma once

#include <thrsyn/boolfn.hpp>
#include <thrsyn/circuit.hpp>
#include <thrsyn/circuit_io.hpp>
#include <thrsyn/common.hpp>
#include <thrsyn/protocol.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace thrsyn
{

/// k-dimensional array of protocol nodes indexed by colors in [1, k].
/// Entry (c_1, ..., c_k) lives at sum (c_i - 1) k^(i-1).
struct completeness_array
{
  uint32_t k = 2;
  std::vector<uint32_t> entries;

  std::size_t index( std::span<const uint32_t> colors ) const
  {
    std::size_t idx = 0;
    for ( std::size_t i = colors.size(); i-- > 0; )
      idx = idx * k + ( colors[i] - 1 );
    return idx;
  }
  uint32_t at( std::span<const uint32_t> colors ) const { return entries[index( colors )]; }

  /// Colors of entry `idx`.
  std::vector<uint32_t> colors( std::size_t idx ) const
  {
    std::vector<uint32_t> c( k );
    for ( uint32_t i = 0; i < k; ++i, idx /= k )
      c[i] = static_cast<uint32_t>( idx % k ) + 1;
    return c;
  }

  /// Distinct non-terminal nodes, ascending by id.
  std::vector<uint32_t> open_nodes( const light_form& lf ) const
  {
    std::vector<uint32_t> u;
    for ( auto v : entries )
      if ( !lf.nodes[v].terminal )
        u.push_back( v );
    std::sort( u.begin(), u.end() );
    u.erase( std::unique( u.begin(), u.end() ), u.end() );
    return u;
  }

  bool all_terminal( const light_form& lf ) const
  {
    return std::all_of( entries.begin(), entries.end(), [&]( auto v ) { return lf.nodes[v].terminal; } );
  }

  friend bool operator==( const completeness_array&, const completeness_array& ) = default;
};

/// A communication profile over tracked nodes together with a color. Profile
/// bit j belongs to the j-th tracked node in id order; terminals are not
/// tracked since their bit is always 0.
struct color_pair
{
  std::vector<uint8_t> profile;
  uint32_t color = 1;

  friend auto operator<=>( const color_pair&, const color_pair& ) = default;
  friend bool operator==( const color_pair&, const color_pair& ) = default;
};

inline completeness_array initial_array( const light_form& lf )
{
  std::size_t entries = 1;
  for ( uint32_t i = 0; i < lf.k; ++i )
    entries *= lf.k;
  return { lf.k, std::vector<uint32_t>( entries, lf.start ) };
}

/// Advances every entry one edge: entry (d_1..d_k) looks at
/// v = M[c_{d_1}, ..., c_{d_k}] and follows the edge whose label is the bit of
/// survivor d_i's profile at v, where i owns v. Terminal entries stay put.
inline completeness_array step_array( const completeness_array& m, std::span<const color_pair> survivors,
                                      std::span<const uint32_t> tracked, const light_form& lf,
                                      const std::vector<std::array<uint32_t, 2>>& next )
{
  if ( survivors.size() != m.k )
    throw precondition_error( "step_array needs exactly k survivors" );
  completeness_array out = m;
  std::vector<uint32_t> c( m.k );
  for ( std::size_t idx = 0; idx < m.entries.size(); ++idx )
  {
    const auto d = m.colors( idx );
    for ( uint32_t j = 0; j < m.k; ++j )
      c[j] = survivors[d[j] - 1].color;
    const auto v = m.at( c );
    if ( lf.nodes[v].terminal )
    {
      out.entries[idx] = v;
      continue;
    }
    const auto owner = lf.nodes[v].owner;
    const auto pos = std::lower_bound( tracked.begin(), tracked.end(), v ) - tracked.begin();
    if ( pos == static_cast<std::ptrdiff_t>( tracked.size() ) || tracked[pos] != v )
      throw precondition_error( "step_array: node " + std::to_string( v ) + " is not tracked by the profiles" );
    out.entries[idx] = next[v][survivors[d[owner - 1] - 1].profile[pos]];
  }
  return out;
}

inline constexpr uint64_t default_configuration_budget = 1'000'000;

struct compile_options
{
  uint64_t budget = default_configuration_budget;
  bool check_invariants = true;
  bool check_precondition = true;
};

struct compile_report
{
  uint32_t iterations = 0;
  uint64_t configurations = 0;
  std::size_t circuit_size = 0;
  uint32_t circuit_depth = 0;
  uint64_t budget = 0;

  json to_json() const
  {
    return json{ { "iterations", iterations },
                 { "configurations", configurations },
                 { "circuit_size", circuit_size },
                 { "circuit_depth", circuit_depth },
                 { "budget_used", budget ? static_cast<double>( configurations ) / static_cast<double>( budget ) : 0.0 } };
  }
};

struct compile_result
{
  circuit c;
  compile_report report;
};

namespace detail
{

inline uint32_t terminal_gate( circuit& c, std::map<std::pair<uint32_t, bool>, uint32_t>& leaves, const light_form& lf, uint32_t t )
{
  const auto& node = lf.nodes[t];
  const bool negated = lf.kind == game_kind::r && node.label_bit;
  auto [it, fresh] = leaves.try_emplace( { node.label, negated }, 0 );
  if ( fresh )
    it->second = negated ? c.add_lit( node.label, true ) : c.add_var( node.label );
  return it->second;
}

inline void check_low( const completeness_array& m, const light_form& lf, const std::vector<uint32_t>& depths, uint32_t h )
{
  for ( auto v : m.entries )
    if ( !lf.nodes[v].terminal && depths[v] < h )
      throw error( "array is not " + std::to_string( h ) + "-low: node " + std::to_string( v ) + " has depth " +
                   std::to_string( depths[v] ) );
}

inline void append_key( std::string& key, uint32_t value ) { key.append( reinterpret_cast<const char*>( &value ), sizeof( value ) ); }

inline void finish_report( compile_result& r )
{
  r.c = prune( r.c );
  r.report.circuit_size = size( r.c );
  r.report.circuit_depth = depth( r.c );
}

} // namespace detail

/// Compiles a protocol that computes the game into a THR(k+1,2) circuit C <= f.
///
/// Learner tracks a completeness array M with a coloring g of the still
/// possible inputs. Each round it eliminates attained pairs (profile, color)
/// with THR(k+1,2) gates until at most k remain, then advances M one level.
/// When every entry is terminal it outputs the label of M[c] where c lists
/// colors 1..k with colors nobody holds replaced by a held color.
inline compile_result compile_semantic( const protocol_dag& p, const truth_table& f, const compile_options& opt = {} )
{
  detail::require_arena( p, f );
  if ( auto d = validate( p ) )
    throw precondition_error( "invalid protocol: " + d->code + ": " + d->message );
  if ( opt.check_precondition )
    if ( auto r = computes_game( p, f ); !r )
    {
      std::string w;
      for ( const auto& x : r.inputs )
        w += ( w.empty() ? "" : "," ) + x.str();
      throw precondition_error( "protocol does not compute the game; failing inputs " + w );
    }

  const auto& lf = p.graph;
  const auto k = lf.k;
  const auto next = successor_table( lf );
  const auto depths = node_depths( lf );
  const auto arena_size = p.arena.size();

  compile_result result;
  result.report.budget = opt.budget;
  result.c = circuit( lf.n );
  std::map<std::pair<uint32_t, bool>, uint32_t> leaves;
  std::unordered_map<std::string, uint32_t> memo;

  // Compatibility closures per (arena position, party), for invariant checks.
  std::vector<std::vector<std::vector<uint8_t>>> closure;
  if ( opt.check_invariants )
    for ( std::size_t a = 0; a < arena_size; ++a )
    {
      closure.emplace_back();
      for ( uint32_t i = 1; i <= k; ++i )
        closure.back().push_back( compatible_nodes( p, a, i ) );
    }

  // g[a] = color of arena input a, 0 when a is no longer possible.
  auto check_complete = [&]( const completeness_array& m, const std::vector<uint8_t>& g ) {
    for ( std::size_t idx = 0; idx < m.entries.size(); ++idx )
    {
      const auto c = m.colors( idx );
      for ( std::size_t a = 0; a < arena_size; ++a )
        for ( uint32_t i = 0; i < k; ++i )
          if ( g[a] == c[i] && !closure[a][i][m.entries[idx]] )
            throw error( "completeness lost: input " + p.arena[a].str() + " is not " + std::to_string( i + 1 ) +
                         "-compatible with node " + std::to_string( m.entries[idx] ) );
    }
  };

  auto build = [&]( auto&& self, uint32_t h, const completeness_array& m, const std::vector<uint8_t>& g ) -> uint32_t {
    std::string key;
    detail::append_key( key, h );
    for ( auto v : m.entries )
      detail::append_key( key, v );
    key.append( g.begin(), g.end() );
    if ( auto it = memo.find( key ); it != memo.end() )
      return it->second;
    if ( ++result.report.configurations > opt.budget )
      throw budget_error( "compile_semantic: configuration budget of " + std::to_string( opt.budget ) + " exceeded at iteration " +
                          std::to_string( h ) );
    result.report.iterations = std::max( result.report.iterations, h );

    uint32_t gate;
    if ( m.all_terminal( lf ) )
    {
      std::vector<uint8_t> held( k + 1, 0 );
      for ( auto col : g )
        held[col] = 1;
      uint32_t fallback = 1;
      while ( fallback <= k && !held[fallback] )
        ++fallback;
      std::vector<uint32_t> c( k );
      for ( uint32_t i = 1; i <= k; ++i )
        c[i - 1] = held[i] ? i : fallback;
      gate = detail::terminal_gate( result.c, leaves, lf, m.at( c ) );
    }
    else
    {
      const auto tracked = m.open_nodes( lf );
      std::vector<color_pair> pair_of( arena_size );
      std::vector<color_pair> attained;
      for ( std::size_t a = 0; a < arena_size; ++a )
      {
        if ( !g[a] )
          continue;
        auto& cp = pair_of[a];
        cp.color = g[a];
        for ( auto v : tracked )
          cp.profile.push_back( p.message( v, a ) );
        attained.push_back( cp );
      }
      std::sort( attained.begin(), attained.end() );
      attained.erase( std::unique( attained.begin(), attained.end() ), attained.end() );

      if ( attained.size() > k )
      {
        std::vector<uint32_t> children;
        for ( uint32_t j = 0; j <= k; ++j )
        {
          auto rest = g;
          for ( std::size_t a = 0; a < arena_size; ++a )
            if ( rest[a] && pair_of[a] == attained[j] )
              rest[a] = 0;
          children.push_back( self( self, h, m, rest ) );
        }
        gate = result.c.add_thr( std::move( children ) );
      }
      else
      {
        while ( attained.size() < k )
          attained.push_back( attained.back() );
        std::vector<uint8_t> g2( arena_size, 0 );
        for ( std::size_t a = 0; a < arena_size; ++a )
          if ( g[a] )
            g2[a] = static_cast<uint8_t>( std::find( attained.begin(), attained.end(), pair_of[a] ) - attained.begin() + 1 );
        auto m2 = step_array( m, attained, tracked, lf, next );
        if ( opt.check_invariants )
        {
          detail::check_low( m2, lf, depths, h + 1 );
          check_complete( m2, g2 );
        }
        gate = self( self, h + 1, m2, g2 );
      }
    }
    memo.emplace( std::move( key ), gate );
    return gate;
  };

  if ( arena_size == 0 )
    throw precondition_error( "compile_semantic: f has no zeros" );
  std::vector<uint8_t> g( arena_size, 1 );
  const auto out = build( build, 0, initial_array( lf ), g );
  result.c.set_output( out );
  detail::finish_report( result );
  return result;
}

/// Compiles a light form alone. Pairs range over every profile of the
/// non-terminal nodes of M and every color; correctness needs a protocol
/// that strongly computes the game. The output is the label of M[1, ..., k].
inline compile_result compile_syntactic( const light_form& lf, const compile_options& opt = {} )
{
  if ( auto d = validate( lf ) )
    throw precondition_error( "invalid light form: " + d->code + ": " + d->message );
  const auto k = lf.k;
  const auto next = successor_table( lf );
  const auto depths = node_depths( lf );

  compile_result result;
  result.report.budget = opt.budget;
  result.c = circuit( lf.n );
  std::map<std::pair<uint32_t, bool>, uint32_t> leaves;
  std::unordered_map<std::string, uint32_t> memo;

  auto exceeded = [&]( uint32_t h, std::size_t width ) {
    return budget_error( "compile_syntactic: configuration budget of " + std::to_string( opt.budget ) + " exceeded at iteration " +
                         std::to_string( h ) + " with |U'| = " + std::to_string( width ) );
  };

  // `removed` flags rejected pairs; pair index = profile value * k + (color - 1),
  // with the first tracked node as the most significant profile bit.
  auto build = [&]( auto&& self, uint32_t h, const completeness_array& m, const std::vector<uint8_t>& removed ) -> uint32_t {
    std::string key;
    detail::append_key( key, h );
    for ( auto v : m.entries )
      detail::append_key( key, v );
    key.append( removed.begin(), removed.end() );
    if ( auto it = memo.find( key ); it != memo.end() )
      return it->second;
    const auto tracked = m.open_nodes( lf );
    if ( ++result.report.configurations > opt.budget )
      throw exceeded( h, tracked.size() );
    result.report.iterations = std::max( result.report.iterations, h );

    uint32_t gate;
    if ( m.all_terminal( lf ) )
    {
      std::vector<uint32_t> c( k );
      for ( uint32_t i = 0; i < k; ++i )
        c[i] = i + 1;
      gate = detail::terminal_gate( result.c, leaves, lf, m.at( c ) );
    }
    else
    {
      std::vector<std::size_t> remaining;
      for ( std::size_t idx = 0; idx < removed.size() && remaining.size() <= k; ++idx )
        if ( !removed[idx] )
          remaining.push_back( idx );
      if ( remaining.size() > k )
      {
        std::vector<uint32_t> children;
        for ( uint32_t j = 0; j <= k; ++j )
        {
          auto rest = removed;
          rest[remaining[j]] = 1;
          children.push_back( self( self, h, m, rest ) );
        }
        gate = result.c.add_thr( std::move( children ) );
      }
      else
      {
        const auto width = tracked.size();
        std::vector<color_pair> survivors;
        for ( auto idx : remaining )
        {
          color_pair cp;
          cp.color = static_cast<uint32_t>( idx % k ) + 1;
          const auto profile = idx / k;
          for ( std::size_t j = 0; j < width; ++j )
            cp.profile.push_back( ( profile >> ( width - 1 - j ) ) & 1u );
          survivors.push_back( std::move( cp ) );
        }
        while ( survivors.size() < k )
          survivors.push_back( survivors.back() );
        auto m2 = step_array( m, survivors, tracked, lf, next );
        if ( opt.check_invariants )
          detail::check_low( m2, lf, depths, h + 1 );
        const auto width2 = m2.open_nodes( lf ).size();
        if ( width2 > 24 || ( std::size_t{ 1 } << width2 ) * k > opt.budget )
          throw exceeded( h + 1, width2 );
        gate = self( self, h + 1, m2, std::vector<uint8_t>( ( std::size_t{ 1 } << width2 ) * k, 0 ) );
      }
    }
    memo.emplace( std::move( key ), gate );
    return gate;
  };

  const auto m0 = initial_array( lf );
  const auto width0 = m0.open_nodes( lf ).size();
  const auto out = build( build, 0, m0, std::vector<uint8_t>( ( std::size_t{ 1 } << width0 ) * k, 0 ) );
  result.c.set_output( out );
  detail::finish_report( result );
  return result;
}

/// Exhaustive comparison against THR^b_a.
inline bool equals_threshold( const circuit& c, uint32_t b, uint32_t a )
{
  if ( c.arity() != b )
    throw precondition_error( "equals_threshold: circuit arity " + std::to_string( c.arity() ) + " differs from " + std::to_string( b ) );
  return to_truth_table( c ) == thr( b, a );
}

} // namespace thrsyn
