#!/usr/bin/env python
"""
A script to summarize an experiment results file per scheduler
"""

import mapredsched as mrs
import argparse

parser = argparse.ArgumentParser()
parser.add_argument('filename')
parser.add_argument('--format', choices=('csv', 'json'), default='csv')
args = parser.parse_args()

with open(args.filename, 'rb') as f:
    res = mrs.parse_results(f.read(), args.format)

print(f'{len(res.seeds)} seeds, DMRS best on {mrs.dmrs_best_rate(res):.0%} of them')
for scheduler, stats in mrs.summarize(res).items():
    print('-' * 30)
    print('Scheduler:', scheduler)
    print(f"mean TWCT: {stats['mean_twct_hours']:.4f}h")
    print(f"DMRS improvement: {stats['mean_improvement_vs_dmrs']:.1%}")
    print(f"DMRS at least as good: {stats['dmrs_win_rate']:.0%}")
