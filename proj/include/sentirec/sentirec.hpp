#pragma once

#include "sentirec/corpus_io.hpp"
#include "sentirec/error.hpp"
#include "sentirec/evaluation.hpp"
#include "sentirec/featurizer.hpp"
#include "sentirec/fusion.hpp"
#include "sentirec/ratings_matrix.hpp"
#include "sentirec/svd_cf.hpp"
#include "sentirec/svm.hpp"
#include "sentirec/textprep.hpp"
