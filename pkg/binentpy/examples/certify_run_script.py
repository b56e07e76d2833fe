# -*- coding: utf-8 -*-
"""
Example script for a certification run.

Reads the parameters from a yaml file, certifies the inequality for this
k and writes the report (JSON) and the region table (CSV) next to the
parameter file; all files are then moved to a results directory, with
date and time in their names.

(within binentpy)
"""

import logging
import os
import shutil
from datetime import datetime

from binentpy.inequality_verifier import CertifyInput, certify

logging.basicConfig(level=logging.INFO)

directory_path = os.path.dirname(os.path.abspath(__file__))
results_dir = os.path.join(directory_path, "results")

# Name of the yaml-file
y_file_name0 = "certify_parameters_file1"
y_file_name = os.path.join(directory_path, y_file_name0)

# read the yaml file as input
inp = CertifyInput.read_yaml(y_file_name + ".yaml")

report = certify(*inp.all_out())
print(f"{inp.name}: k = {report.k:g}, {report.overall}, "
      f"min margin {report.min_certified_margin:2.3e}")
print(report.counts())

with open(y_file_name + "_report.json", mode="wt", encoding="utf-8") as file:
    file.write(report.to_json())
report.regions_frame().to_csv(y_file_name + "_regions.csv", index=False,
                              float_format="%.17g")

# copying the results to the results directory, including date and time
dt_string = datetime.now().strftime("_%Y_%m_%d_%H_%M_%S")
os.makedirs(results_dir, exist_ok=True)
for file in os.listdir(directory_path):
    base, _, ending = file.partition(".")
    if not base.startswith(y_file_name0) or not ending:
        continue
    target = os.path.join(results_dir, base + dt_string + "." + ending)
    source = os.path.join(directory_path, file)
    if ending == "yaml":
        shutil.copy(source, target)
    else:
        shutil.move(source, target)
