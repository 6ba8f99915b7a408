@problemName Toy4
@timeStamps false
@univariate true
@classLabel true a b
@data
-2,-1,0,1,2,-2,-1,0:a
-1.5,0.5,2.5,-0.5,1.5,-1.5,0.5,2.5:a
-1,2,0,3,1,-1,2,0:b
-0.5,3.5,2.5,1.5,0.5,-0.5,3.5,2.5:b
