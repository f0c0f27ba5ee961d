#pragma once

#include <thrsyn/boolfn.hpp>
#include <thrsyn/circuit.hpp>
#include <thrsyn/circuit_io.hpp>
#include <thrsyn/common.hpp>
#include <thrsyn/compile.hpp>
#include <thrsyn/constructions.hpp>
#include <thrsyn/games.hpp>
#include <thrsyn/protocol.hpp>
#include <thrsyn/protocol_io.hpp>
#include <thrsyn/sortnet.hpp>
