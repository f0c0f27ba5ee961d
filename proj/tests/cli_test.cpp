#include <thrsyn/thrsyn.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace thrsyn;

namespace
{

struct run_result
{
  int code = -1;
  std::string out;
};

/// Runs the CLI with `args`, capturing stdout; stderr goes to a side file.
run_result run( const std::string& args )
{
  static int counter = 0;
  const auto out = std::filesystem::path( "cli_out_" + std::to_string( counter++ ) + ".txt" );
  const auto cmd = std::string( THRSYN_CLI ) + " " + args + " > " + out.string() + " 2> cli_err.txt";
  const int status = std::system( cmd.c_str() );
  run_result r;
  r.code = WIFEXITED( status ) ? WEXITSTATUS( status ) : -1;
  std::ifstream in( out );
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  std::filesystem::remove( out );
  return r;
}

json last_report( const run_result& r )
{
  std::istringstream in( r.out );
  std::string line, last;
  while ( std::getline( in, line ) )
    if ( !line.empty() )
      last = line;
  return json::parse( last );
}

} // namespace

TEST( Cli, GenMajThenVerify )
{
  ASSERT_EQ( run( "gen maj --n 2 --base batcher --out maj5.json" ).code, 0 );
  const auto v = run( "verify maj5.json --against thr:5:3 --basis maj3" );
  EXPECT_EQ( v.code, 0 ) << v.out;
  EXPECT_TRUE( last_report( v )["ok"].get<bool>() );
  const auto wrong = run( "verify maj5.json --against thr:5:2" );
  EXPECT_EQ( wrong.code, 1 );
  EXPECT_TRUE( last_report( wrong ).contains( "counterexample" ) );
}

TEST( Cli, CheckQkWitness )
{
  const auto r = run( "check qk --f thr:7:3 --k 4" );
  EXPECT_EQ( r.code, 1 );
  const auto j = last_report( r );
  ASSERT_EQ( j["witness"].size(), 4u );
  std::vector<bit_vector> w;
  for ( const auto& s : j["witness"] )
    w.push_back( bit_vector::parse( s.get<std::string>() ) );
  for ( const auto& x : w )
    EXPECT_FALSE( thr( 7, 3 )( x ) );
  EXPECT_FALSE( common_zero( w ).has_value() );
  EXPECT_EQ( run( "check qk --f thr:7:3 --k 3" ).code, 0 );
  EXPECT_EQ( run( "check rk --f maj:5 --k 2" ).code, 0 );
}

TEST( Cli, ProtocolSim )
{
  ASSERT_EQ( run( "protocol gen --kind binsearch --k 2 --n 1 --out bs21.json" ).code, 0 );
  const auto r = run( "protocol sim bs21.json --inputs 100,010" );
  EXPECT_EQ( r.code, 0 );
  EXPECT_EQ( last_report( r )["output"], 3 );
  EXPECT_EQ( run( "protocol check bs21.json --f maj:3" ).code, 0 );
  EXPECT_EQ( run( "protocol check bs21.json --f maj:3 --mode strong" ).code, 0 );
  EXPECT_EQ( run( "protocol sim bs21.json --inputs 110,010" ).code, 2 );
}

TEST( Cli, CompileAndExtract )
{
  ASSERT_EQ( run( "protocol gen --kind theorem3 --k 3 --n 1 --out t31.json" ).code, 0 );
  const auto sem = run( "compile t31.json --f thr:4:2 --out t31c.json --report t31r.json" );
  EXPECT_EQ( sem.code, 0 ) << sem.out;
  EXPECT_TRUE( last_report( sem )["equal"].get<bool>() );
  EXPECT_EQ( run( "verify t31c.json --against thr:4:2 --basis thr3" ).code, 0 );
  const auto rep = read_json_file( "t31r.json" );
  EXPECT_TRUE( rep.contains( "budget_used" ) );

  ASSERT_EQ( run( "protocol gen --kind binsearch --k 2 --n 1 --light --out bs21l.json" ).code, 0 );
  const auto syn = run( "compile bs21l.json --mode syntactic --f maj:3 --out bs21c.json" );
  EXPECT_EQ( syn.code, 0 ) << syn.out;
  EXPECT_TRUE( last_report( syn )["leq"].get<bool>() );

  ASSERT_EQ( run( "protocol gen --kind theorem3 --k 3 --n 1 --light --out t31l.json" ).code, 0 );
  EXPECT_EQ( run( "compile t31l.json --mode syntactic --out wide.json" ).code, 1 );

  const auto ext = run( "circuit2protocol t31c.json --f thr:4:2 --k 3 --out t31p.json" );
  EXPECT_EQ( ext.code, 0 ) << ext.out;
  EXPECT_EQ( run( "protocol check t31p.json --f thr:4:2" ).code, 0 );
}

TEST( Cli, TransformAndGenerators )
{
  ASSERT_EQ( run( "gen dnc --b 5 --a 3 --out dnc53.json" ).code, 0 );
  const auto t = run( "transform maj3 --formula dnc53.json --n 2 --delta auto --seed 7 --out t2.json" );
  EXPECT_EQ( t.code, 0 ) << t.out;
  EXPECT_TRUE( last_report( t )["formula"].get<bool>() );
  EXPECT_EQ( run( "verify t2.json --against maj:5 --basis maj3" ).code, 0 );
  ASSERT_EQ( run( "gen batcher --m 5 --out b5.json" ).code, 0 );
  EXPECT_EQ( run( "transform maj3 --formula b5.json --n 2 --delta 3 --seed 7 --out bad.json" ).code, 2 );
  const auto g = run( "gen thr --k 2 --n 2 --out thr53.json" );
  EXPECT_EQ( g.code, 0 );
  EXPECT_EQ( run( "verify thr53.json --against thr:5:3 --basis thr2" ).code, 0 );
}

TEST( Cli, OutFilesRoundTrip )
{
  ASSERT_EQ( run( "gen maj --n 1 --base dnc --out m3.json --strategy m3s.json" ).code, 0 );
  const auto c = read_json_file( "m3.json" );
  EXPECT_EQ( circuit_to_json( circuit_from_json( c ) ).dump(), c.dump() );
  const auto s = read_json_file( "m3s.json" );
  EXPECT_EQ( strategy_to_json( strategy_from_json( s ) ).dump(), s.dump() );
  EXPECT_EQ( run( "verify m3s.json --against maj:3" ).code, 0 );

  ASSERT_EQ( run( "protocol gen --kind theorem3 --k 2 --n 2 --out t22.json" ).code, 0 );
  const auto p = read_json_file( "t22.json" );
  EXPECT_EQ( protocol_to_json( protocol_from_json( p ) ).dump(), p.dump() );
}

TEST( Cli, ExportAndStats )
{
  ASSERT_EQ( run( "gen batcher --m 3 --out b3.json" ).code, 0 );
  EXPECT_EQ( run( "export dot b3.json --out b3.dot" ).code, 0 );
  EXPECT_TRUE( std::filesystem::exists( "b3.dot" ) );
  const auto s = run( "stats b3.json" );
  EXPECT_EQ( s.code, 0 );
  EXPECT_EQ( last_report( s )["type"], "circuit" );
  ASSERT_EQ( run( "protocol gen --kind binsearch --k 2 --n 1 --out bs.json" ).code, 0 );
  EXPECT_EQ( run( "export dot bs.json --out bs.dot" ).code, 0 );
  EXPECT_EQ( last_report( run( "stats bs.json" ) )["type"], "protocol" );
}

TEST( Cli, UsageErrorsExitTwo )
{
  EXPECT_EQ( run( "gen maj --base batcher --out x.json" ).code, 2 );
  EXPECT_EQ( run( "frobnicate" ).code, 2 );
  EXPECT_EQ( run( "check qk --f xor:3 --k 2" ).code, 2 );
  EXPECT_EQ( run( "verify missing.json --against maj:3" ).code, 2 );
}
