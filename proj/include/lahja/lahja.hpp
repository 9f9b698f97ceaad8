#ifndef LAHJA_LAHJA_HPP
#define LAHJA_LAHJA_HPP

#include "lahja/classify.hpp"
#include "lahja/cluster.hpp"
#include "lahja/config.hpp"
#include "lahja/corpus.hpp"
#include "lahja/embedding.hpp"
#include "lahja/eval.hpp"
#include "lahja/labels.hpp"
#include "lahja/lexicon.hpp"
#include "lahja/preprocess.hpp"
#include "lahja/synthgen.hpp"

#endif
