// thrsyn: generate, transform, compile, simulate and verify threshold circuits
// and multiparty protocols.

#include <thrsyn/thrsyn.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace thrsyn;

namespace
{

// Verification failed; the report has already been printed.
struct verification_failure
{
};

void report( const json& j ) { std::cout << j.dump() << std::endl; }

std::string join( const std::vector<bit_vector>& xs )
{
  std::string s;
  for ( const auto& x : xs )
    s += ( s.empty() ? "" : "," ) + x.str();
  return s;
}

/// Circuits or strategy light forms (the latter are mapped to their circuit).
circuit load_circuit( const std::string& path )
{
  const auto j = read_json_file( path );
  if ( j.value( "kind", "" ) == "strategy" )
    return lightform_to_circuit( strategy_from_json( j ) );
  if ( is_protocol_json( j ) )
    throw precondition_error( "'" + path + "' holds a protocol, expected a circuit" );
  return circuit_from_json( j );
}

json circuit_stats( const circuit& c )
{
  json hist = json::object();
  for ( const auto& [shape, count] : gate_histogram( c ) )
    hist[shape] = count;
  return json{ { "type", "circuit" }, { "n", c.arity() }, { "size", size( c ) }, { "depth", depth( c ) },
               { "formula", is_formula( c ) }, { "gates", hist } };
}

void write_text( const std::string& path, const std::string& text )
{
  std::ofstream out( path );
  if ( !out )
    throw precondition_error( "cannot write '" + path + "'" );
  out << text;
}

basis parse_basis( const std::string& s )
{
  if ( s == "maj3" )
    return basis::maj3();
  if ( s == "monotone" )
    return basis::monotone();
  if ( s.rfind( "thr", 0 ) == 0 && s.size() > 3 )
  {
    const auto k = std::stoul( s.substr( 3 ) );
    if ( k < 2 )
      throw precondition_error( "--basis thrK needs K >= 2" );
    return basis::threshold( static_cast<uint32_t>( k ), false );
  }
  throw precondition_error( "--basis must be maj3, thrK or monotone, got '" + s + "'" );
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Threshold circuits from multiparty communication protocols" };
  app.require_subcommand( 1 );

  // gen
  auto* gen = app.add_subcommand( "gen", "generate circuits" );
  gen->require_subcommand( 1 );
  uint32_t n = 1, k = 2, b = 3, a = 2;
  std::string out, base = "batcher", strategy_out;

  auto* gen_maj = gen->add_subcommand( "maj", "MAJ3 circuit for MAJ_{2n+1} via the cover-tree strategy" );
  gen_maj->add_option( "--n", n, "majority over 2n+1 inputs" )->required()->check( CLI::Range( 1, 12 ) );
  gen_maj->add_option( "--base", base, "monotone base circuit" )->check( CLI::IsMember( { "batcher", "dnc" } ) );
  gen_maj->add_option( "--out", out, "circuit JSON" )->required();
  gen_maj->add_option( "--strategy", strategy_out, "also write the strategy light form" );

  auto* gen_thr = gen->add_subcommand( "thr", "THR(k+1,2) circuit for THR^{kn+1}_{n+1} via the counting protocol" );
  gen_thr->add_option( "--k", k )->required()->check( CLI::Range( 2, 8 ) );
  gen_thr->add_option( "--n", n )->required()->check( CLI::Range( 1, 16 ) );
  gen_thr->add_option( "--out", out )->required();

  auto* gen_dnc = gen->add_subcommand( "dnc", "monotone divide-and-conquer formula for THR^b_a" );
  gen_dnc->add_option( "--b", b )->required()->check( CLI::Range( 1, 64 ) );
  gen_dnc->add_option( "--a", a )->required()->check( CLI::Range( 1, 64 ) );
  gen_dnc->add_option( "--out", out )->required();

  auto* gen_batcher = gen->add_subcommand( "batcher", "monotone Batcher circuit for MAJ_m" );
  uint32_t m = 3;
  gen_batcher->add_option( "--m", m )->required()->check( CLI::Range( 1, 64 ) );
  gen_batcher->add_option( "--out", out )->required();

  // transform
  auto* transform = app.add_subcommand( "transform", "formula transformations" );
  transform->require_subcommand( 1 );
  auto* maj3 = transform->add_subcommand( "maj3", "monotone majority formula to MAJ3 formula" );
  std::string formula_path, delta_text = "auto";
  uint64_t seed = 0;
  maj3->add_option( "--formula", formula_path )->required();
  maj3->add_option( "--n", n )->required()->check( CLI::Range( 1, 10 ) );
  maj3->add_option( "--delta", delta_text, "amplifier depth or 'auto'" );
  maj3->add_option( "--seed", seed )->required();
  maj3->add_option( "--out", out )->required();

  // protocol
  auto* protocol = app.add_subcommand( "protocol", "build, simulate and check protocols" );
  protocol->require_subcommand( 1 );
  std::string proto_kind, proto_path, inputs_text, fspec;
  bool light = false;
  auto* pgen = protocol->add_subcommand( "gen", "built-in protocols for THR^{kn+1}_{n+1}" );
  pgen->add_option( "--kind", proto_kind )->required()->check( CLI::IsMember( { "binsearch", "theorem3" } ) );
  pgen->add_option( "--k", k )->required()->check( CLI::Range( 2, 8 ) );
  pgen->add_option( "--n", n )->required()->check( CLI::Range( 1, 32 ) );
  pgen->add_option( "--out", out )->required();
  pgen->add_flag( "--light", light, "write only the light form" );

  auto* psim = protocol->add_subcommand( "sim", "run a protocol on one input per party" );
  psim->add_option( "protocol", proto_path )->required();
  psim->add_option( "--inputs", inputs_text, "comma-separated bit strings, coordinate 1 first" )->required();

  auto* pcheck = protocol->add_subcommand( "check", "exhaustive game check" );
  pcheck->add_option( "protocol", proto_path )->required();
  pcheck->add_option( "--f", fspec )->required();
  std::string check_mode = "computes", compile_mode = "semantic";
  pcheck->add_option( "--mode", check_mode )->check( CLI::IsMember( { "computes", "strong" } ) );

  // compile
  auto* comp = app.add_subcommand( "compile", "protocol to THR(k+1,2) circuit" );
  std::string report_path;
  uint64_t budget = default_configuration_budget;
  comp->add_option( "protocol", proto_path )->required();
  comp->add_option( "--mode", compile_mode )->check( CLI::IsMember( { "semantic", "syntactic" } ) );
  comp->add_option( "--f", fspec, "target function; required for semantic mode" );
  comp->add_option( "--out", out )->required();
  comp->add_option( "--report", report_path, "also write the compiler report" );
  comp->add_option( "--budget", budget, "configuration budget" );

  // circuit2protocol / extract
  auto* c2p = app.add_subcommand( "circuit2protocol", "THR(k+1,2) circuit to protocol" );
  c2p->alias( "extract" );
  std::string circuit_path, game = "Q";
  c2p->add_option( "circuit", circuit_path )->required();
  c2p->add_option( "--f", fspec )->required();
  c2p->add_option( "--k", k )->required()->check( CLI::Range( 2, 8 ) );
  c2p->add_option( "--game", game )->check( CLI::IsMember( { "Q", "R" } ) );
  c2p->add_option( "--out", out )->required();

  // verify
  auto* verify = app.add_subcommand( "verify", "exhaustive equality and basis check" );
  std::string against, basis_name;
  verify->add_option( "circuit", circuit_path )->required();
  verify->add_option( "--against", against )->required();
  verify->add_option( "--basis", basis_name );

  // check
  auto* check = app.add_subcommand( "check", "Q_k / R_k membership" );
  check->require_subcommand( 1 );
  auto* qk = check->add_subcommand( "qk" );
  auto* rk = check->add_subcommand( "rk" );
  for ( auto* sub : { qk, rk } )
  {
    sub->add_option( "--f", fspec )->required();
    sub->add_option( "--k", k )->required()->check( CLI::Range( 2, 64 ) );
  }

  // export
  auto* exp = app.add_subcommand( "export", "Graphviz export" );
  exp->require_subcommand( 1 );
  auto* dot = exp->add_subcommand( "dot" );
  std::string input_path;
  dot->add_option( "input", input_path )->required();
  dot->add_option( "--out", out )->required();

  // stats
  auto* stats = app.add_subcommand( "stats", "size, depth and gate histogram" );
  stats->add_option( "input", input_path )->required();

  try
  {
    app.parse( argc, argv );
  }
  catch ( const CLI::CallForHelp& e )
  {
    return app.exit( e );
  }
  catch ( const CLI::ParseError& e )
  {
    app.exit( e );
    return 2;
  }

  try
  {
    if ( gen_maj->parsed() )
    {
      const auto m2 = 2 * n + 1;
      const auto bc = base == "batcher" ? batcher_majority( m2 ) : dnc_threshold_formula( m2, n + 1 );
      const auto s = theorem1_strategy( n, bc );
      const auto c = lightform_to_circuit( s.form );
      write_json_file( out, circuit_to_json( c ) );
      if ( !strategy_out.empty() )
        write_json_file( strategy_out, strategy_to_json( s.form ) );
      auto r = circuit_stats( c );
      r["cover_depth"] = lemma1_tree( m2 ).depth();
      r["base_depth"] = depth( bc );
      report( r );
    }
    else if ( gen_thr->parsed() )
    {
      const auto r = theorem3_circuit( k, n );
      write_json_file( out, circuit_to_json( r.c ) );
      auto j = circuit_stats( r.c );
      j["compile"] = r.report.to_json();
      report( j );
    }
    else if ( gen_dnc->parsed() )
    {
      const auto c = dnc_threshold_formula( b, a );
      write_json_file( out, circuit_to_json( c ) );
      report( circuit_stats( c ) );
    }
    else if ( gen_batcher->parsed() )
    {
      const auto c = batcher_majority( m );
      write_json_file( out, circuit_to_json( c ) );
      report( circuit_stats( c ) );
    }
    else if ( maj3->parsed() )
    {
      const auto f = load_circuit( formula_path );
      uint32_t delta;
      if ( delta_text == "auto" )
        delta = tune_delta( n, seed ).delta;
      else
      {
        try
        {
          delta = static_cast<uint32_t>( std::stoul( delta_text ) );
        }
        catch ( const std::logic_error& )
        {
          throw precondition_error( "--delta must be a non-negative integer or 'auto'" );
        }
      }
      const auto r = theorem2_transform( f, n, delta, seed );
      write_json_file( out, circuit_to_json( r.c ) );
      auto j = circuit_stats( r.c );
      j["delta"] = delta;
      j["attempts"] = r.attempts;
      j["formula_size"] = size( f );
      report( j );
    }
    else if ( pgen->parsed() )
    {
      const bool bs = proto_kind == "binsearch";
      if ( light )
      {
        const auto lf = bs ? binary_search_light_form( k, n ) : theorem3_light_form( k, n );
        write_json_file( out, light_form_to_json( lf ) );
        report( json{ { "type", "light_form" }, { "k", k }, { "n", lf.n }, { "size", size( lf ) }, { "depth", depth( lf ) } } );
      }
      else
      {
        const auto p = bs ? binary_search_protocol( k, n ) : theorem3_protocol( k, n );
        write_json_file( out, protocol_to_json( p ) );
        report( json{ { "type", "protocol" }, { "k", k }, { "n", p.graph.n }, { "size", size( p ) }, { "depth", depth( p ) } } );
      }
    }
    else if ( psim->parsed() )
    {
      const auto p = protocol_from_json( read_json_file( proto_path ) );
      if ( auto d = validate( p ) )
        throw precondition_error( "invalid protocol: " + d->code + ": " + d->message );
      std::vector<bit_vector> xs;
      std::stringstream ss( inputs_text );
      for ( std::string tok; std::getline( ss, tok, ',' ); )
        xs.push_back( bit_vector::parse( tok ) );
      const auto t = simulate( p, xs );
      json j{ { "output", t.output }, { "terminal", t.terminal }, { "path_length", t.path.size() } };
      if ( p.graph.kind == game_kind::r )
        j["bit"] = t.output_bit ? 1 : 0;
      report( j );
    }
    else if ( pcheck->parsed() )
    {
      const auto p = protocol_from_json( read_json_file( proto_path ) );
      const auto f = parse_function( fspec );
      const auto r = check_mode == "strong" ? strongly_computes( p, f ) : computes_game( p, f );
      json j{ { "mode", check_mode }, { "holds", r.holds }, { "evaluations", r.evaluations } };
      if ( !r.holds )
      {
        j["counterexample"] = join( r.inputs );
        j["terminal"] = *r.terminal;
        if ( r.party )
          j["party"] = *r.party;
      }
      report( j );
      if ( !r.holds )
        throw verification_failure{};
    }
    else if ( comp->parsed() )
    {
      const auto j = read_json_file( proto_path );
      compile_options opt;
      opt.budget = budget;
      compile_result r;
      std::optional<truth_table> f;
      if ( !fspec.empty() )
        f = parse_function( fspec );
      if ( compile_mode == "syntactic" )
        r = compile_syntactic( light_form_from_json( j ), opt );
      else
      {
        if ( !f )
          throw precondition_error( "--f is required in semantic mode" );
        r = compile_semantic( protocol_from_json( j ), *f, opt );
      }
      write_json_file( out, circuit_to_json( r.c ) );
      auto rep = r.report.to_json();
      if ( !report_path.empty() )
        write_json_file( report_path, rep );
      bool ok = true;
      if ( f )
      {
        const auto l = leq( r.c, *f );
        rep["leq"] = l.holds;
        rep["equal"] = to_truth_table( r.c ) == *f;
        if ( !l )
        {
          rep["counterexample"] = l.counterexample->str();
          ok = false;
        }
      }
      report( rep );
      if ( !ok )
        throw verification_failure{};
    }
    else if ( c2p->parsed() )
    {
      const auto c = load_circuit( circuit_path );
      const auto f = parse_function( fspec );
      const auto p = circuit_to_protocol( c, f, parse_game_kind( game ), k );
      write_json_file( out, protocol_to_json( p ) );
      report( json{ { "type", "protocol" }, { "k", k }, { "n", p.graph.n }, { "size", size( p ) }, { "depth", depth( p ) } } );
    }
    else if ( verify->parsed() )
    {
      const auto c = load_circuit( circuit_path );
      const auto f = parse_function( against );
      if ( c.arity() != f.arity() )
        throw precondition_error( "circuit has " + std::to_string( c.arity() ) + " inputs, function has " + std::to_string( f.arity() ) );
      const auto table = to_truth_table( c, truth_table::max_arity );
      json j{ { "inputs", f.size() } };
      bool ok = true;
      std::optional<uint64_t> bad;
      for ( uint64_t x = 0; x < f.size() && !bad; ++x )
        if ( table.get( x ) != f.get( x ) )
          bad = x;
      j["equal"] = !bad;
      if ( bad )
      {
        ok = false;
        j["counterexample"] = bit_vector( f.arity(), *bad ).str();
        j["circuit_value"] = table.get( *bad ) ? 1 : 0;
      }
      if ( !basis_name.empty() )
      {
        const bool in_basis = basis_check( c, parse_basis( basis_name ) );
        j["basis"] = basis_name;
        j["basis_ok"] = in_basis;
        ok = ok && in_basis;
      }
      j["ok"] = ok;
      report( j );
      if ( !ok )
        throw verification_failure{};
    }
    else if ( qk->parsed() || rk->parsed() )
    {
      const auto f = parse_function( fspec );
      const bool q = qk->parsed();
      const auto r = q ? is_in_qk( f, k ) : is_in_rk( f, k );
      json j{ { "property", q ? "Q" : "R" }, { "k", k }, { "member", r.member }, { "evaluations", r.evaluations } };
      if ( !r.member )
      {
        std::vector<std::string> w;
        for ( const auto& x : r.witness )
          w.push_back( x.str() );
        j["witness"] = w;
      }
      report( j );
      if ( !r.member )
        throw verification_failure{};
    }
    else if ( dot->parsed() )
    {
      const auto j = read_json_file( input_path );
      std::ostringstream os;
      if ( is_protocol_json( j ) )
        write_dot( light_form_from_json( j ), os );
      else
        write_dot( load_circuit( input_path ), os );
      write_text( out, os.str() );
      report( json{ { "written", out } } );
    }
    else if ( stats->parsed() )
    {
      const auto j = read_json_file( input_path );
      if ( is_protocol_json( j ) )
      {
        const auto lf = light_form_from_json( j );
        if ( auto d = validate( lf ) )
          throw precondition_error( "invalid protocol: " + d->code + ": " + d->message );
        std::size_t terminals = 0;
        for ( const auto& node : lf.nodes )
          terminals += node.terminal ? 1 : 0;
        report( json{ { "type", j.contains( "messages" ) ? "protocol" : "light_form" },
                      { "k", lf.k },
                      { "n", lf.n },
                      { "kind", to_string( lf.kind ) },
                      { "size", size( lf ) },
                      { "depth", depth( lf ) },
                      { "terminals", terminals } } );
      }
      else
        report( circuit_stats( load_circuit( input_path ) ) );
    }
  }
  catch ( const verification_failure& )
  {
    return 1;
  }
  catch ( const precondition_error& e )
  {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  catch ( const std::exception& e )
  {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
