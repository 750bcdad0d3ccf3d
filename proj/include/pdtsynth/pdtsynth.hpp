#pragma once

#include "pdtsynth/alignment.hpp"
#include "pdtsynth/config.hpp"
#include "pdtsynth/costing.hpp"
#include "pdtsynth/csv.hpp"
#include "pdtsynth/datastore.hpp"
#include "pdtsynth/deflate.hpp"
#include "pdtsynth/diversity.hpp"
#include "pdtsynth/error.hpp"
#include "pdtsynth/lcs.hpp"
#include "pdtsynth/openai_provider.hpp"
#include "pdtsynth/pipeline.hpp"
#include "pdtsynth/pos_tagger.hpp"
#include "pdtsynth/prompts.hpp"
#include "pdtsynth/provider.hpp"
#include "pdtsynth/records.hpp"
#include "pdtsynth/reply_parse.hpp"
#include "pdtsynth/rng.hpp"
#include "pdtsynth/scoring.hpp"
#include "pdtsynth/scripted_provider.hpp"
#include "pdtsynth/synth.hpp"
#include "pdtsynth/text.hpp"
#include "pdtsynth/tokenize.hpp"
#include "pdtsynth/wordlist.hpp"
#include "pdtsynth/worker_pool.hpp"
