#pragma once

#include "lscd/affinity_propagation.hpp"
#include "lscd/binarize.hpp"
#include "lscd/common.hpp"
#include "lscd/conllu.hpp"
#include "lscd/contextual.hpp"
#include "lscd/evaluation.hpp"
#include "lscd/lexicon.hpp"
#include "lscd/manifest.hpp"
#include "lscd/profile.hpp"
#include "lscd/scoring.hpp"
#include "lscd/static_space.hpp"
#include "lscd/usage_matrix.hpp"
