// Umbrella header.

#ifndef KATREL_KATREL_HPP
#define KATREL_KATREL_HPP

#include "katrel/absint.hpp"
#include "katrel/algebra.hpp"
#include "katrel/automata.hpp"
#include "katrel/editdist.hpp"
#include "katrel/hypotheses.hpp"
#include "katrel/kat_expr.hpp"
#include "katrel/kat_parser.hpp"
#include "katrel/lang.hpp"
#include "katrel/oracle.hpp"
#include "katrel/symbols.hpp"
#include "katrel/synth.hpp"
#include "katrel/translate.hpp"

#endif
