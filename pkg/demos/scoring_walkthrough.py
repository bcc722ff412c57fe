"""
Scoring handwriting boxes
=========================

Walks through the box geometry and the image-level scores on a toy page.
"""

from handloc.geometry import BBox, iou, region_iou, union_area
from handloc.metrics import aggregate, evaluate_image, mark_bad_quality

# two ground-truth regions: a signature and a margin note
gt = [BBox(100, 400, 300, 460), BBox(520, 80, 640, 200)]

# the prediction covers the signature a little loosely and adds one false alarm
pred = [BBox(95, 395, 310, 462), BBox(20, 20, 60, 40)]

print("pairwise IoU, signature:", round(iou(pred[0], gt[0]), 3))
print("area covered by the ground truth:", union_area(gt))
print("region IoU of the two unions:", round(region_iou(pred, gt), 3))

# one hit, one missed region, one false positive
score = evaluate_image(pred, gt, image_id="page-1")
print("AP_FP at 0.8:", score.ap_fp_80, " at 0.5:", score.ap_fp_50)

# a page with five predictions gets flagged as Bad-Quality
noisy = evaluate_image([BBox(i * 50, 0, i * 50 + 40, 40) for i in range(5)], gt, image_id="page-2")
scores = mark_bad_quality([score, noisy])
report = aggregate(scores)
print("mean AP_FP_80 %.3f, with BQ at 0.35: %.3f, without BQ pages: %.3f"
      % (report.ap_fp_80, report.ap_fp_80_star, report.ap_fp_80_plus))
