# Eight short two-channel series in two classes.
@problemName Toy8
@timeStamps false
@missing false
@univariate false
@dimension 2
@equalLength true
@seriesLength 12
@classLabel true up down
@data
0,0.5391,0.6547,0.5437,0.735,1.3145,1.7996,1.8457,1.7517,2.0214,2.6261,3.046:1,0.7648,0.17,-0.5048,-0.9422,-0.9365,-0.4903,0.1865,0.7756,0.9999,0.7539,0.1534:up
0.2524,-0.0263,-0.6328,-1.0447,-1.0249,-0.9686,-1.3245,-1.9375,-2.2758,-2.21,-2.2028,-2.631:0.9776,0.4624,-0.2233,-0.7569,-0.8875,-0.5536,0.0876,0.7347,1.0833,0.9694,0.4466,-0.2392:down
0.2728,0.2027,0.2019,0.6378,1.2381,1.4895,1.3901,1.4516,1.9503,2.5218,2.6951,2.5826:0.7403,0.0712,-0.5374,-0.7991,-0.591,-0.0108,0.6685,1.1275,1.1502,0.7261,0.0545,-0.5486:up
0.0423,-0.5248,-0.6894,-0.5765,-0.7178,-1.2725,-1.7943,-1.8849,-1.7779,-1.9963,-2.5864,-3.0499:0.3707,-0.2885,-0.671,-0.5968,-0.1008,0.5837,1.1347,1.2932,0.9845,0.354,-0.302,-0.6748:down
-0.227,0.0003,0.5935,1.0497,1.0669,0.9861,1.2919,1.9026,2.2897,2.2524,2.2116,2.5933:-0.0161,-0.5041,-0.5668,-0.1748,0.4875,1.1087,1.3965,1.2157,0.6513,-0.0314,-0.5111,-0.5624:up
-0.2877,-0.245,-0.2096,-0.5997,-1.21,-1.5126,-1.4305,-1.4502,-1.9091,-2.5011,-2.7253,-2.6194:-0.3011,-0.4983,-0.2259,0.3878,1.0544,1.4602,1.4144,0.9385,0.2565,-0.3111,-0.4972,-0.2143:down
-0.0838,0.5051,0.7203,0.6127,0.7062,1.2301,1.7831,1.9214,1.8086,1.9762,2.545,3.0478:-0.39,-0.2481,0.2927,0.978,1.4855,1.5766,1.2084,0.554,-0.0787,-0.3922,-0.2391,0.3087:up
0.1971,0.0207,-0.5523,-1.0486,-1.1075,-1.0089,-1.2635,-1.8646,-2.2978,-2.2947,-2.2261,-2.5588:-0.2365,0.2097,0.8865,1.4756,1.6999,1.4539,0.8534,0.1807,-0.2477,-0.2304,0.2245,0.903:down
