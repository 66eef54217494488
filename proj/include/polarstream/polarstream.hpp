#pragma once

#include "polarstream/config.hpp"
#include "polarstream/corpus.hpp"
#include "polarstream/document.hpp"
#include "polarstream/drift.hpp"
#include "polarstream/harness.hpp"
#include "polarstream/kappa.hpp"
#include "polarstream/label_service.hpp"
#include "polarstream/manifest.hpp"
#include "polarstream/mnb.hpp"
#include "polarstream/oracle.hpp"
#include "polarstream/report.hpp"
#include "polarstream/sampling.hpp"
#include "polarstream/tokenizer.hpp"
