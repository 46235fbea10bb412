#pragma once

// Everything, for tools and tests that want the whole library.
#include "mlw/derived.hpp"
#include "mlw/error.hpp"
#include "mlw/lemmas.hpp"
#include "mlw/model.hpp"
#include "mlw/model_file.hpp"
#include "mlw/notation.hpp"
#include "mlw/parser.hpp"
#include "mlw/pattern.hpp"
#include "mlw/printer.hpp"
#include "mlw/proof.hpp"
#include "mlw/proof_json.hpp"
#include "mlw/proof_mode.hpp"
#include "mlw/script.hpp"
#include "mlw/semantics.hpp"
#include "mlw/signature.hpp"
#include "mlw/subset.hpp"
#include "mlw/syntax.hpp"
#include "mlw/tauto.hpp"
#include "mlw/theories.hpp"
#include "mlw/theory.hpp"
