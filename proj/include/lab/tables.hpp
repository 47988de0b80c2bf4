// Numeric tables: Bernoulli numbers and Gauss-Legendre nodes/weights.
// Values generated to 40 significant digits with mpmath 1.3.0.
#pragma once
namespace lab::tables {
// B_{2k} for k = 1..30, as decimal strings (parsed at the working precision).
inline constexpr const char* kBernoulli2k[30] = {
  "0.1666666666666666666666666666666666666667",
  "-0.03333333333333333333333333333333333333333",
  "0.02380952380952380952380952380952380952381",
  "-0.03333333333333333333333333333333333333333",
  "0.07575757575757575757575757575757575757576",
  "-0.2531135531135531135531135531135531135531",
  "1.166666666666666666666666666666666666667",
  "-7.092156862745098039215686274509803921569",
  "54.97117794486215538847117794486215538847",
  "-529.1242424242424242424242424242424242424",
  "6192.12318840579710144927536231884057971",
  "-86580.25311355311355311355311355311355311",
  "1425517.166666666666666666666666666666667",
  "-27298231.06781609195402298850574712643678",
  "601580873.9006423683843038681748359167714",
  "-15116315767.09215686274509803921568627451",
  "429614643061.1666666666666666666666666667",
  "-13711655205088.33277215908794856163277216",
  "488332318973593.1666666666666666666666667",
  "-19296579341940068.14863266814486326681449",
  "841693047573682615.0005537098560354374308",
  "-40338071854059455413.07681159420289855072",
  "2115074863808199160560.145390070921985816",
  "-120866265222965259346027.3119370825253178",
  "7500866746076964366855720.075757575757576",
  "-503877810148106891413789303.0522012578616",
  "36528776484818123335110430842.97117794486",
  "-2849876930245088222626914643291.067816092",
  "238654274996836276446459819192192.1497175",
  "-21399949257225333665810744765191097.39267",
};
// Gauss-Legendre order 32 on [-1,1]: nodes then weights.
inline constexpr const char* kGL32Nodes[32] = {
    "-0.997263861849481563544981128665040727138538",
    "-0.985611511545268335400175044630901978632396",
    "-0.964762255587506430773811928118274960388895",
    "-0.934906075937739689170919134835409325528671",
    "-0.896321155766052123965307243719212268478996",
    "-0.849367613732569970133693004967742538954887",
    "-0.794483795967942406963097298970428902095479",
    "-0.732182118740289680387426665091267146630270",
    "-0.663044266930215200975115168663238368977022",
    "-0.587715757240762329040745476401826858450940",
    "-0.506899908932229390023747474377821230180284",
    "-0.421351276130635345364119436172426478335877",
    "-0.331868602282127649779916805730187996195775",
    "-0.239287362252137074544603209165501520608855",
    "-0.144471961582796493485186373598810652203846",
    "-0.0483076656877383162348125704405021636908473",
    "0.0483076656877383162348125704405021636908473",
    "0.144471961582796493485186373598810652203846",
    "0.239287362252137074544603209165501520608855",
    "0.331868602282127649779916805730187996195775",
    "0.421351276130635345364119436172426478335877",
    "0.506899908932229390023747474377821230180284",
    "0.587715757240762329040745476401826858450940",
    "0.663044266930215200975115168663238368977022",
    "0.732182118740289680387426665091267146630270",
    "0.794483795967942406963097298970428902095479",
    "0.849367613732569970133693004967742538954887",
    "0.896321155766052123965307243719212268478996",
    "0.934906075937739689170919134835409325528671",
    "0.964762255587506430773811928118274960388895",
    "0.985611511545268335400175044630901978632396",
    "0.997263861849481563544981128665040727138538",
};
inline constexpr const char* kGL32Weights[32] = {
    "0.00701861000947009660040706373885318251337722",
    "0.0162743947309056706051705622063866181795430",
    "0.0253920653092620594557525897892240292875540",
    "0.0342738629130214331026877322523727069948402",
    "0.0428358980222266806568786466061255284928109",
    "0.0509980592623761761961632446895216952601848",
    "0.0586840934785355471452836373001708867501205",
    "0.0658222227763618468376500637069387728775364",
    "0.0723457941088485062253993564784877916043370",
    "0.0781938957870703064717409188283066710397868",
    "0.0833119242269467552221990746043486115387469",
    "0.0876520930044038111427714627518022875484497",
    "0.0911738786957638847128685771116370625448614",
    "0.0938443990808045656391802376681172600361001",
    "0.0956387200792748594190820022041311005948905",
    "0.0965400885147278005667648300635757947368606",
    "0.0965400885147278005667648300635757947368606",
    "0.0956387200792748594190820022041311005948905",
    "0.0938443990808045656391802376681172600361001",
    "0.0911738786957638847128685771116370625448614",
    "0.0876520930044038111427714627518022875484497",
    "0.0833119242269467552221990746043486115387469",
    "0.0781938957870703064717409188283066710397868",
    "0.0723457941088485062253993564784877916043370",
    "0.0658222227763618468376500637069387728775364",
    "0.0586840934785355471452836373001708867501205",
    "0.0509980592623761761961632446895216952601848",
    "0.0428358980222266806568786466061255284928109",
    "0.0342738629130214331026877322523727069948402",
    "0.0253920653092620594557525897892240292875540",
    "0.0162743947309056706051705622063866181795430",
    "0.00701861000947009660040706373885318251337722",
};
}  // namespace lab::tables
