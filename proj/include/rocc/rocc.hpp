#pragma once

#include "rocc/datasets.hpp"
#include "rocc/errors.hpp"
#include "rocc/eval.hpp"
#include "rocc/pipeline.hpp"
#include "rocc/retrieval.hpp"
#include "rocc/scoring.hpp"
#include "rocc/selector.hpp"
#include "rocc/text.hpp"
#include "rocc/version.hpp"
