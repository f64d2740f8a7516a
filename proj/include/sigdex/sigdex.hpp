#ifndef SIGDEX_SIGDEX_HPP
#define SIGDEX_SIGDEX_HPP

// Everything except the command-line driver.

#include "dag.hpp"
#include "encoder.hpp"
#include "engine.hpp"
#include "error.hpp"
#include "importers.hpp"
#include "index.hpp"
#include "lce.hpp"
#include "parse.hpp"
#include "range_tree.hpp"
#include "slp.hpp"
#include "walk.hpp"

#endif
