/**
 * Coarse continent outlines as [lon, lat] polylines, hand-simplified to a
 * few degrees of fidelity. Display context for shadow maps only; never used
 * in any computation.
 */
export type Polyline = Array<[number, number]>;

export const COASTLINES: Polyline[] = [
  // North and Central America
  [
    [-168, 65], [-166, 60], [-158, 58], [-152, 60], [-140, 60], [-130, 55],
    [-125, 48], [-124, 40], [-117, 33], [-110, 23], [-105, 20], [-95, 16],
    [-85, 10], [-83, 9], [-81, 25], [-80, 32], [-76, 35], [-70, 42],
    [-66, 45], [-60, 47], [-65, 60], [-78, 62], [-85, 66], [-110, 68],
    [-130, 70], [-155, 71], [-168, 65],
  ],
  // South America
  [
    [-77, 8], [-79, 1], [-81, -5], [-70, -18], [-70, -33], [-73, -45],
    [-74, -52], [-68, -55], [-65, -41], [-58, -34], [-48, -28], [-40, -22],
    [-35, -9], [-35, -5], [-50, 0], [-60, 5], [-62, 10], [-72, 12], [-77, 8],
  ],
  // Africa
  [
    [-6, 35], [-17, 21], [-17, 15], [-12, 8], [-4, 5], [8, 4], [9, -1],
    [12, -6], [12, -18], [15, -28], [18, -34], [26, -34], [33, -26],
    [40, -16], [40, -11], [42, -2], [48, 5], [51, 12], [43, 12], [38, 18],
    [34, 28], [32, 31], [20, 32], [10, 34], [-6, 35],
  ],
  // Eurasia
  [
    [-10, 36], [-9, 43], [-5, 48], [0, 50], [8, 54], [12, 56], [20, 60],
    [5, 58], [5, 62], [15, 68], [25, 71], [40, 67], [45, 68], [60, 69],
    [75, 72], [90, 75], [110, 76], [130, 72], [150, 70], [170, 67],
    [180, 65], [162, 60], [158, 52], [150, 59], [142, 54], [135, 44],
    [130, 42], [127, 35], [122, 38], [122, 30], [108, 16], [105, 10],
    [100, 6], [98, 8], [98, 16], [90, 22], [87, 20], [80, 13], [77, 8],
    [73, 18], [67, 24], [60, 25], [59, 22], [53, 17], [45, 13], [43, 12],
    [39, 21], [35, 28], [34, 30], [35, 33], [36, 36], [30, 36], [27, 37],
    [26, 40], [23, 38], [20, 40], [19, 42], [13, 45], [12, 44], [10, 43],
    [8, 44], [4, 43], [0, 40], [-2, 37], [-6, 36], [-10, 36],
  ],
  // British Isles
  [[-5, 50], [2, 52], [0, 53], [-2, 56], [-5, 58], [-8, 57], [-5, 54], [-5, 50]],
  // Greenland
  [
    [-45, 60], [-53, 66], [-54, 70], [-58, 75], [-68, 76], [-60, 80],
    [-40, 83], [-25, 82], [-20, 79], [-22, 70], [-32, 68], [-42, 62], [-45, 60],
  ],
  // Japan
  [[130, 31], [132, 34], [137, 35], [141, 39], [142, 43], [145, 44], [141, 45], [140, 42], [136, 37], [131, 34], [130, 31]],
  // Sumatra and Java
  [[95, 5], [102, -4], [106, -7], [114, -8], [116, -9]],
  // Borneo
  [[109, 0], [113, 4], [117, 6], [119, 1], [116, -4], [110, -2], [109, 0]],
  // Australia
  [
    [114, -22], [114, -34], [118, -35], [124, -33], [130, -32], [136, -35],
    [140, -38], [147, -38], [150, -37], [153, -28], [153, -25], [146, -19],
    [142, -11], [136, -12], [132, -11], [126, -14], [122, -18], [114, -22],
  ],
  // New Zealand
  [[173, -35], [178, -38], [174, -42], [167, -46], [170, -43], [172, -40], [173, -35]],
  // Madagascar
  [[44, -25], [47, -25], [50, -16], [49, -12], [44, -17], [44, -25]],
  // Antarctic coast (open polyline)
  [[-180, -71], [-120, -74], [-60, -70], [0, -70], [60, -67], [120, -67], [180, -71]],
];
