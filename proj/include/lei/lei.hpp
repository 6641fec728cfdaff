#pragma once

#include "lei/error.hpp"
#include "lei/formula.hpp"
#include "lei/syntax.hpp"
#include "lei/model.hpp"
#include "lei/model_io.hpp"
#include "lei/semantics.hpp"
#include "lei/oracle.hpp"
#include "lei/update.hpp"
#include "lei/proofkit.hpp"
#include "lei/proof_script.hpp"
#include "lei/extmodel.hpp"
#include "lei/random.hpp"
#include "lei/figures.hpp"
#include "lei/suites.hpp"
