#pragma once

#include <thrsyn/boolfn.hpp>
#include <thrsyn/circuit.hpp>
#include <thrsyn/common.hpp>
#include <thrsyn/compile.hpp>
#include <thrsyn/games.hpp>
#include <thrsyn/protocol.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace thrsyn
{

/// Ternary tree over coordinate subsets; every element of an internal node's
/// set occurs in at least two of its children's sets.
struct cover_tree
{
  std::vector<std::vector<uint32_t>> sets;
  std::vector<std::vector<uint32_t>> children;
  uint32_t root = 0;

  bool is_leaf( uint32_t v ) const { return children[v].empty(); }

  uint32_t depth() const
  {
    auto rec = [&]( auto&& self, uint32_t v ) -> uint32_t {
      uint32_t d = 0;
      for ( auto c : children[v] )
        d = std::max( d, 1 + self( self, c ) );
      return d;
    };
    return rec( rec, root );
  }
};

/// Splits A into parts of sizes floor(|A|/3), floor(|A|/3) and the rest in
/// ascending order; the children are the three pairwise unions.
inline cover_tree lemma1_tree( uint32_t m )
{
  if ( m < 2 )
    throw precondition_error( "lemma1_tree requires m >= 2" );
  cover_tree t;
  auto build = [&]( auto&& self, std::vector<uint32_t> a ) -> uint32_t {
    const auto id = static_cast<uint32_t>( t.sets.size() );
    t.sets.push_back( a );
    t.children.emplace_back();
    if ( a.size() == 2 )
      return id;
    const auto third = a.size() / 3;
    std::vector<uint32_t> a1( a.begin(), a.begin() + third ), a2( a.begin() + third, a.begin() + 2 * third ),
        a3( a.begin() + 2 * third, a.end() );
    auto join = []( const std::vector<uint32_t>& x, const std::vector<uint32_t>& y ) {
      std::vector<uint32_t> u( x );
      u.insert( u.end(), y.begin(), y.end() );
      std::sort( u.begin(), u.end() );
      return u;
    };
    std::vector<uint32_t> kids;
    for ( auto&& part : { join( a1, a2 ), join( a1, a3 ), join( a2, a3 ) } )
      kids.push_back( self( self, part ) );
    t.children[id] = kids;
    return id;
  };
  std::vector<uint32_t> all( m );
  for ( uint32_t i = 0; i < m; ++i )
    all[i] = i + 1;
  t.root = build( build, all );
  return t;
}

/// Complete ternary MAJ3 tree whose leaves are conjunctions x_i AND x_j.
/// Nodes are in heap order: children of u are 3u+1, 3u+2, 3u+3.
struct amplifier_tree
{
  uint32_t n = 1;
  uint32_t depth = 0;
  std::vector<std::pair<uint32_t, uint32_t>> leaves;

  std::size_t num_internal() const { return ( leaves.size() - 1 ) / 2; }
};

/// Probability that a MAJ3 of three independent bits, each 1 with
/// probability t, is 1.
inline double amplify( double t ) { return 3 * t * t - 2 * t * t * t; }

namespace detail
{

/// Inputs of length 2n+1 with at most n ones, ascending.
inline std::vector<uint64_t> low_weight_inputs( uint32_t n )
{
  std::vector<uint64_t> xs;
  for ( uint64_t x = 0; x < ( uint64_t{ 1 } << ( 2 * n + 1 ) ); ++x )
    if ( static_cast<uint32_t>( std::popcount( x ) ) <= n )
      xs.push_back( x );
  return xs;
}

/// Values of every amplifier node over the inputs `xs`, as bitsets.
inline std::vector<index_set> amplifier_values( const amplifier_tree& t, const std::vector<uint64_t>& xs )
{
  const auto internal = t.num_internal();
  std::vector<index_set> val( internal + t.leaves.size(), index_set( xs.size() ) );
  for ( std::size_t l = 0; l < t.leaves.size(); ++l )
  {
    const auto [i, j] = t.leaves[l];
    for ( std::size_t a = 0; a < xs.size(); ++a )
      if ( ( ( xs[a] >> ( i - 1 ) ) & 1u ) && ( ( xs[a] >> ( j - 1 ) ) & 1u ) )
        val[internal + l].insert( a );
  }
  for ( std::size_t u = internal; u-- > 0; )
  {
    const auto &p = val[3 * u + 1], &q = val[3 * u + 2], &r = val[3 * u + 3];
    for ( std::size_t a = 0; a < xs.size(); ++a )
      if ( int( p.contains( a ) ) + int( q.contains( a ) ) + int( r.contains( a ) ) >= 2 )
        val[u].insert( a );
  }
  return val;
}

} // namespace detail

inline constexpr uint32_t max_amplifier_arity = 21;

/// Number of inputs with at most n ones on which the amplifier outputs 1.
inline uint64_t verify_amplifier( const amplifier_tree& t )
{
  if ( 2 * t.n + 1 > max_amplifier_arity )
    throw budget_error( "verify_amplifier: 2^" + std::to_string( 2 * t.n + 1 ) + " inputs exceed the verification budget" );
  const auto xs = detail::low_weight_inputs( t.n );
  return detail::amplifier_values( t, xs )[0].count();
}

struct lemma2_result
{
  std::optional<amplifier_tree> tree;
  /// Violating inputs of the last rejected sample.
  uint64_t violations = 0;
  uint32_t attempts = 0;
};

/// Draws one amplifier tree of depth `delta`: each leaf pair (i, j) is taken
/// uniformly from [2n+1]^2, i first.
inline amplifier_tree lemma2_draw( uint32_t n, uint32_t delta, rng& gen )
{
  if ( n < 1 )
    throw precondition_error( "lemma2 requires n >= 1" );
  if ( delta > 16 )
    throw budget_error( "amplifier depth " + std::to_string( delta ) + " exceeds the size budget (3^16 leaves)" );
  amplifier_tree t{ n, delta, {} };
  std::size_t leaves = 1;
  for ( uint32_t d = 0; d < delta; ++d )
    leaves *= 3;
  const uint64_t m = 2 * n + 1;
  t.leaves.reserve( leaves );
  for ( std::size_t l = 0; l < leaves; ++l )
  {
    const auto i = static_cast<uint32_t>( gen.below( m ) + 1 );
    const auto j = static_cast<uint32_t>( gen.below( m ) + 1 );
    t.leaves.emplace_back( i, j );
  }
  return t;
}

/// Samples until a tree vanishes on all inputs with at most n ones, giving up
/// after `max_attempts` samples.
inline lemma2_result lemma2_sample( uint32_t n, uint32_t delta, uint64_t seed, uint32_t max_attempts = 1 )
{
  rng gen( seed );
  lemma2_result r;
  while ( r.attempts < max_attempts )
  {
    ++r.attempts;
    auto t = lemma2_draw( n, delta, gen );
    r.violations = verify_amplifier( t );
    if ( r.violations == 0 )
    {
      r.tree = std::move( t );
      return r;
    }
  }
  return r;
}

inline uint32_t nominal_delta( uint32_t n ) { return ceil_log2( n ) + 10; }

struct delta_tuning
{
  uint32_t delta = 0;
  amplifier_tree tree;
  uint32_t attempts = 0;
};

/// Smallest depth, counting down from the default, at which a sample passes
/// within `retries` attempts.
inline delta_tuning tune_delta( uint32_t n, uint64_t seed, uint32_t retries = 20 )
{
  std::optional<delta_tuning> best;
  for ( auto delta = nominal_delta( n ) + 1; delta-- > 0; )
  {
    auto r = lemma2_sample( n, delta, seed, retries );
    if ( !r.tree )
      break;
    best = delta_tuning{ delta, std::move( *r.tree ), r.attempts };
  }
  if ( !best )
    throw error( "tune_delta: no verified amplifier at the default depth " + std::to_string( nominal_delta( n ) ) );
  return std::move( *best );
}

namespace detail
{

/// Node descriptions of the majority strategies, with hypotheses computed on
/// demand from precomputed evaluations over the zero-set.
struct majority_context
{
  enum class role
  {
    terminal,
    cover,
    amplifier,
    gadget,
    and_gate,
    or_gate
  };
  struct descriptor
  {
    role r = role::terminal;
    uint32_t ref = 0; // cover node, amplifier node or base gate
    uint32_t i = 0, j = 0;
  };

  uint32_t m = 0;
  std::vector<bit_vector> arena;
  std::vector<descriptor> nodes;
  circuit base;
  std::vector<std::vector<uint8_t>> base_on, base_neg; // [arena][gate] on z and on its complement
  std::optional<cover_tree> cover;
  std::vector<index_set> amp_zero; // amplifier node evaluates to 0, over the arena

  index_set where( auto&& pred ) const
  {
    index_set s( arena.size() );
    for ( std::size_t a = 0; a < arena.size(); ++a )
      if ( pred( arena[a], a ) )
        s.insert( a );
    return s;
  }

  index_set invariant( uint32_t g, uint32_t i, uint32_t j ) const
  {
    return where( [&]( const bit_vector& z, std::size_t a ) {
      return ( !base_on[a][g] && !z[i] && z[j] ) || ( base_neg[a][g] && z[i] && !z[j] );
    } );
  }

  std::vector<index_set> hypotheses( uint32_t v ) const
  {
    const auto& d = nodes[v];
    switch ( d.r )
    {
    case role::cover:
    {
      const auto& w = cover->sets[d.ref];
      std::vector<index_set> h;
      for ( auto c : cover->children[d.ref] )
      {
        const auto& wc = cover->sets[c];
        h.push_back( where( [&]( const bit_vector& z, std::size_t ) {
          for ( auto e : w )
            if ( !z[e] )
              return std::binary_search( wc.begin(), wc.end(), e );
          return false;
        } ) );
      }
      return h;
    }
    case role::amplifier:
      return { amp_zero[3 * d.ref + 1], amp_zero[3 * d.ref + 2], amp_zero[3 * d.ref + 3] };
    case role::gadget:
      return { where( [&]( const bit_vector& z, std::size_t ) { return !( z[d.i] && !z[d.j] ); } ),
               where( [&]( const bit_vector& z, std::size_t ) { return !( !z[d.i] && z[d.j] ); } ),
               where( [&]( const bit_vector& z, std::size_t ) { return z[d.i] || z[d.j]; } ) };
    case role::and_gate:
    case role::or_gate:
    {
      const auto& g = base.gates()[d.ref];
      const bool is_and = d.r == role::and_gate;
      return { invariant( g.children[0], d.i, d.j ), invariant( g.children[1], d.i, d.j ),
               where( [&]( const bit_vector& z, std::size_t ) { return is_and ? ( !z[d.i] && z[d.j] ) : ( z[d.i] && !z[d.j] ); } ) };
    }
    case role::terminal:
      break;
    }
    throw precondition_error( "terminals pose no hypotheses" );
  }
};

inline std::shared_ptr<majority_context> majority_setup( uint32_t n, const circuit& base, const char* who )
{
  const uint32_t m = 2 * n + 1;
  if ( base.arity() != m )
    throw precondition_error( std::string( who ) + ": base arity must be 2n+1 = " + std::to_string( m ) );
  if ( !basis_check( base, basis::monotone() ) )
    throw precondition_error( std::string( who ) + ": base must be monotone over {AND, OR, variables}" );
  const auto f = maj( m );
  if ( !( to_truth_table( base ) == f ) )
    throw precondition_error( std::string( who ) + ": base does not compute MAJ_" + std::to_string( m ) );
  auto ctx = std::make_shared<majority_context>();
  ctx->m = m;
  ctx->base = prune( base );
  ctx->arena = f.zeros();
  for ( const auto& z : ctx->arena )
  {
    ctx->base_on.push_back( evaluate_gates( ctx->base, z ) );
    ctx->base_neg.push_back( evaluate_gates( ctx->base, z.negated() ) );
  }
  return ctx;
}

/// Adds the three-way gadget for a pair (i, j) known to contain a zero:
/// output i, output j, or descend a copy of the base.
inline uint32_t add_gadget( strategy_light_form& s, majority_context& ctx, uint32_t i, uint32_t j )
{
  using role = majority_context::role;
  auto push = [&]( strategy_node node, majority_context::descriptor d ) {
    s.nodes.push_back( std::move( node ) );
    ctx.nodes.push_back( d );
    return static_cast<uint32_t>( s.nodes.size() - 1 );
  };
  auto terminal = [&]( uint32_t coordinate ) { return push( { true, coordinate, false, {} }, {} ); };

  const auto gadget = push( { false, 0, false, {} }, { role::gadget, 0, i, j } );
  const auto ti = terminal( i ), tj = terminal( j );

  std::vector<std::optional<uint32_t>> copy( ctx.base.num_gates() );
  auto rec = [&]( auto&& self, uint32_t g ) -> uint32_t {
    if ( copy[g] )
      return *copy[g];
    const auto& gt = ctx.base.gates()[g];
    uint32_t v;
    if ( gt.is_leaf() )
      v = terminal( gt.var );
    else
    {
      const bool is_and = gt.kind == gate_kind::and_;
      v = push( { false, 0, false, {} }, { is_and ? role::and_gate : role::or_gate, g, i, j } );
      const auto u = self( self, gt.children[0] );
      const auto w = self( self, gt.children[1] );
      const auto fresh = terminal( is_and ? i : j );
      s.nodes[v].children = { u, w, fresh };
    }
    copy[g] = v;
    return v;
  };
  const auto phase2 = rec( rec, ctx.base.output() );
  s.nodes[gadget].children = { ti, tj, phase2 };
  return gadget;
}

inline strategy finish_majority_strategy( strategy_light_form form, std::shared_ptr<majority_context> ctx )
{
  strategy s;
  s.form = std::move( form );
  s.path_dependent = false;
  s.hypotheses = [ctx]( uint32_t v, std::span<const uint32_t> ) { return ctx->hypotheses( v ); };
  return s;
}

} // namespace detail

/// Learner strategy for the Q_2 game of MAJ_{2n+1}: descend the cover tree
/// following the leftmost zero, then at a pair {i, j} either output a
/// coordinate or walk down `base`, keeping the invariant
/// (g(z) = 0 and z_i z_j = 01) or (g(~z) = 1 and z_i z_j = 10).
inline strategy theorem1_strategy( uint32_t n, const circuit& base )
{
  auto ctx = detail::majority_setup( n, base, "theorem1" );
  ctx->cover = lemma1_tree( ctx->m );
  const auto& t = *ctx->cover;
  strategy_light_form form;
  form.k = 2;
  form.n = ctx->m;
  form.kind = game_kind::q;
  auto rec = [&]( auto&& self, uint32_t v ) -> uint32_t {
    if ( t.is_leaf( v ) )
      return detail::add_gadget( form, *ctx, t.sets[v][0], t.sets[v][1] );
    const auto id = form.add_node();
    ctx->nodes.push_back( { detail::majority_context::role::cover, v, 0, 0 } );
    std::vector<uint32_t> kids;
    for ( auto c : t.children[v] )
      kids.push_back( self( self, c ) );
    form.nodes[id].children = kids;
    return id;
  };
  form.start = rec( rec, t.root );
  return detail::finish_majority_strategy( std::move( form ), ctx );
}

/// MAJ3 circuit for MAJ_{2n+1} built from a monotone circuit `base` for it.
inline circuit theorem1_circuit( uint32_t n, const circuit& base ) { return lightform_to_circuit( theorem1_strategy( n, base ).form ); }

/// Same gadget leaves, but phase 1 descends an amplifier tree.
inline strategy theorem2_strategy( uint32_t n, const circuit& formula, const amplifier_tree& amp )
{
  if ( amp.n != n )
    throw precondition_error( "amplifier tree was drawn for a different n" );
  auto ctx = detail::majority_setup( n, formula, "theorem2" );
  const auto xs = [&] {
    std::vector<uint64_t> v;
    for ( const auto& z : ctx->arena )
      v.push_back( z.bits );
    return v;
  }();
  for ( auto& s : detail::amplifier_values( amp, xs ) )
  {
    index_set zero( xs.size(), true );
    s.for_each( [&]( std::size_t a ) { zero.erase( a ); } );
    ctx->amp_zero.push_back( std::move( zero ) );
  }
  strategy_light_form form;
  form.k = 2;
  form.n = ctx->m;
  form.kind = game_kind::q;
  const auto internal = amp.num_internal();
  auto rec = [&]( auto&& self, std::size_t u ) -> uint32_t {
    if ( u >= internal )
    {
      const auto [i, j] = amp.leaves[u - internal];
      return detail::add_gadget( form, *ctx, i, j );
    }
    const auto id = form.add_node();
    ctx->nodes.push_back( { detail::majority_context::role::amplifier, static_cast<uint32_t>( u ), 0, 0 } );
    std::vector<uint32_t> kids;
    for ( std::size_t c = 3 * u + 1; c <= 3 * u + 3; ++c )
      kids.push_back( self( self, c ) );
    form.nodes[id].children = kids;
    return id;
  };
  form.start = rec( rec, 0 );
  return detail::finish_majority_strategy( std::move( form ), ctx );
}

struct theorem2_result
{
  circuit c;
  amplifier_tree amplifier;
  uint32_t attempts = 0;
};

inline constexpr uint32_t default_sample_retries = 100;

/// MAJ3 formula for MAJ_{2n+1} from a monotone formula for it.
inline theorem2_result theorem2_transform( const circuit& formula, uint32_t n, uint32_t delta, uint64_t seed,
                                           uint32_t retries = default_sample_retries )
{
  if ( !is_formula( formula ) )
    throw precondition_error( "theorem2_transform: input must be a formula (tree-shaped)" );
  auto sample = lemma2_sample( n, delta, seed, retries );
  if ( !sample.tree )
    throw error( "theorem2_transform: no verified amplifier of depth " + std::to_string( delta ) + " after " +
                 std::to_string( retries ) + " samples (last sample failed on " + std::to_string( sample.violations ) + " inputs)" );
  theorem2_result r;
  r.c = lightform_to_circuit( theorem2_strategy( n, formula, *sample.tree ).form );
  r.amplifier = std::move( *sample.tree );
  r.attempts = sample.attempts;
  return r;
}

/// Balanced binary tree over [kn+1]; the left child takes ceil(|T|/2) leaves.
struct index_tree
{
  struct node
  {
    uint32_t lo = 1, hi = 1;
    int32_t left = -1, right = -1;
    uint32_t size() const { return hi - lo + 1; }
  };
  std::vector<node> nodes;

  explicit index_tree( uint32_t leaves )
  {
    auto build = [&]( auto&& self, uint32_t lo, uint32_t hi ) -> int32_t {
      const auto id = static_cast<int32_t>( nodes.size() );
      nodes.push_back( { lo, hi, -1, -1 } );
      if ( lo < hi )
      {
        const auto mid = lo + ( hi - lo + 2 ) / 2 - 1;
        const auto l = self( self, lo, mid );
        const auto r = self( self, mid + 1, hi );
        nodes[id].left = l;
        nodes[id].right = r;
      }
      return id;
    };
    build( build, 1, leaves );
  }

  uint32_t depth() const
  {
    auto rec = [&]( auto&& self, int32_t v ) -> uint32_t {
      return nodes[v].left < 0 ? 0 : 1 + std::max( self( self, nodes[v].left ), self( self, nodes[v].right ) );
    };
    return rec( rec, 0 );
  }
};

/// Leaves of W(s) in order: the pairs (a, s - a) for a = 0..s.
inline std::vector<std::pair<uint32_t, uint32_t>> w_tree_leaves( uint32_t s )
{
  std::vector<std::pair<uint32_t, uint32_t>> out;
  for ( uint32_t a = 0; a <= s; ++a )
    out.emplace_back( a, s - a );
  return out;
}

inline constexpr uint32_t max_threshold_arena_arity = 24;
inline constexpr std::size_t default_protocol_node_budget = 2'000'000;

namespace detail
{

struct counting_protocol
{
  light_form graph;
  index_tree tree{ 1 };
  // Per W-tree node: index-tree node, party count s_i, split point.
  struct wnode
  {
    int32_t v = -1;
    uint32_t s = 0, mid = 0;
  };
  std::vector<wnode> info;
};

/// Builds the counting protocol on kn+1 coordinates. With `share` main nodes
/// (v, s_1..s_k) are merged into a dag, otherwise the result is a tree.
inline counting_protocol counting_light_form( uint32_t k, uint32_t n, bool share, std::size_t budget )
{
  if ( k < 2 || n < 1 )
    throw precondition_error( "counting protocols need k >= 2 and n >= 1" );
  const auto m = k * n + 1;
  if ( m > 64 )
    throw precondition_error( "kn+1 must be at most 64" );
  counting_protocol cp;
  cp.tree = index_tree( m );
  auto& lf = cp.graph;
  lf.k = k;
  lf.n = m;
  lf.kind = game_kind::q;
  const auto& tn = cp.tree.nodes;

  std::map<std::pair<int32_t, std::vector<uint32_t>>, uint32_t> main_nodes;
  std::map<uint32_t, uint32_t> terminals;
  auto grow = [&]( uint32_t id ) {
    if ( lf.nodes.size() > budget )
      throw budget_error( "protocol exceeds " + std::to_string( budget ) + " nodes" );
    cp.info.resize( lf.nodes.size() );
    return id;
  };

  auto main = [&]( auto&& self, int32_t v, const std::vector<uint32_t>& s ) -> uint32_t {
    if ( std::all_of( s.begin(), s.end(), []( auto x ) { return x == 0; } ) )
    {
      const auto label = tn[v].lo;
      if ( share )
        if ( auto it = terminals.find( label ); it != terminals.end() )
          return it->second;
      const auto t = grow( lf.add_terminal( label ) );
      if ( share )
        terminals[label] = t;
      return t;
    }
    if ( share )
      if ( auto it = main_nodes.find( { v, s } ); it != main_nodes.end() )
        return it->second;

    const auto v0 = tn[v].left, v1 = tn[v].right;
    std::vector<uint32_t> a( k, 0 );
    // Party i communicates its count a_i in W(s_i) over the interval [lo, hi].
    auto wtree = [&]( auto&& wself, uint32_t party, uint32_t lo, uint32_t hi ) -> uint32_t {
      if ( party == k )
      {
        uint32_t sum = 0;
        for ( auto x : a )
          sum += x;
        if ( sum < tn[v0].size() )
          return self( self, v0, a );
        std::vector<uint32_t> b( k );
        for ( uint32_t i = 0; i < k; ++i )
          b[i] = s[i] - a[i];
        return self( self, v1, b );
      }
      if ( lo == hi )
      {
        a[party] = lo;
        const auto next_s = party + 1 < k ? s[party + 1] : 0;
        return wself( wself, party + 1, 0, next_s );
      }
      const auto id = grow( lf.add_internal( party + 1 ) );
      const auto mid = ( lo + hi ) / 2;
      cp.info[id] = { v, s[party], mid };
      const auto left = wself( wself, party, lo, mid );
      const auto right = wself( wself, party, mid + 1, hi );
      lf.add_edge( id, left, 0 );
      lf.add_edge( id, right, 1 );
      return id;
    };
    const auto first = wtree( wtree, 0, 0, s[0] );
    if ( share )
      main_nodes[{ v, s }] = first;
    return first;
  };
  lf.start = main( main, 0, std::vector<uint32_t>( k, n ) );
  cp.info.resize( lf.nodes.size() );
  return cp;
}

/// Sets the lowest-index zeros of x until it has exactly `weight` ones.
inline bit_vector pad_to_weight( const bit_vector& x, uint32_t weight )
{
  auto bits = x.bits;
  for ( uint32_t i = 0; i < x.n && static_cast<uint32_t>( std::popcount( bits ) ) < weight; ++i )
    bits |= uint64_t{ 1 } << i;
  return bit_vector( x.n, bits );
}

inline protocol_dag counting_protocol_dag( counting_protocol cp, uint32_t n )
{
  const auto m = cp.graph.n;
  if ( m > max_threshold_arena_arity )
    throw budget_error( "arena of THR(" + std::to_string( m ) + "," + std::to_string( n + 1 ) + ") exceeds 2^" +
                        std::to_string( max_threshold_arena_arity ) + " inputs" );
  protocol_dag p;
  p.graph = std::move( cp.graph );
  p.arena = thr( m, n + 1 ).zeros();
  const auto& tn = cp.tree.nodes;
  auto count = [&]( uint64_t bits, int32_t v ) {
    const auto lo = tn[v].lo, hi = tn[v].hi;
    const auto mask = ( hi - lo + 1 == 64 ? ~uint64_t{ 0 } : ( ( uint64_t{ 1 } << ( hi - lo + 1 ) ) - 1 ) ) << ( lo - 1 );
    return static_cast<uint32_t>( std::popcount( bits & mask ) );
  };
  p.fill_messages( [&]( uint32_t node, const bit_vector& x ) {
    const auto& w = cp.info[node];
    const auto padded = pad_to_weight( x, n ).bits;
    if ( count( padded, w.v ) != w.s )
      return false;
    return count( padded, tn[w.v].left ) > w.mid;
  } );
  return p;
}

} // namespace detail

/// Light form of the dag-like counting protocol for THR^{kn+1}_{n+1}.
inline light_form theorem3_light_form( uint32_t k, uint32_t n, std::size_t budget = default_protocol_node_budget )
{
  return detail::counting_light_form( k, n, true, budget ).graph;
}

/// Dag-like protocol: main nodes (v, s_1..s_k) track how many ones each party
/// holds below v; parties announce their counts in the left child and the
/// protocol moves to a child where the total stays below its leaf count.
inline protocol_dag theorem3_protocol( uint32_t k, uint32_t n, std::size_t budget = default_protocol_node_budget )
{
  return detail::counting_protocol_dag( detail::counting_light_form( k, n, true, budget ), n );
}

/// Tree-like binary search over the index tree with the same messages.
inline protocol_dag binary_search_protocol( uint32_t k, uint32_t n, std::size_t budget = default_protocol_node_budget )
{
  return detail::counting_protocol_dag( detail::counting_light_form( k, n, false, budget ), n );
}

inline light_form binary_search_light_form( uint32_t k, uint32_t n, std::size_t budget = default_protocol_node_budget )
{
  return detail::counting_light_form( k, n, false, budget ).graph;
}

/// THR(k+1,2) circuit for THR^{kn+1}_{n+1}, compiled from the counting protocol
/// and checked for exact equality.
inline compile_result theorem3_circuit( uint32_t k, uint32_t n, const compile_options& opt = {} )
{
  auto r = compile_semantic( theorem3_protocol( k, n ), thr( k * n + 1, n + 1 ), opt );
  if ( !equals_threshold( r.c, k * n + 1, n + 1 ) )
    throw error( "theorem3_circuit: compiled circuit differs from THR(" + std::to_string( k * n + 1 ) + "," + std::to_string( n + 1 ) + ")" );
  return r;
}

} // namespace thrsyn
